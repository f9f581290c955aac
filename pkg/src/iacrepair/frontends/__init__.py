"""Technology frontends: source text to raw IR."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Union

from ..ir import IRScript, Tech
from ._source import ParseError
from .ansible import parse_ansible
from .puppet import parse_puppet


@dataclass(frozen=True)
class TechProfile:
    tech: Tech
    file_extensions: tuple[str, ...]
    comment_syntax: str


PROFILES = (
    TechProfile(Tech.ANSIBLE, (".yml", ".yaml"), "#"),
    TechProfile(Tech.PUPPET, (".pp",), "#"),
)


def detect_tech(path: Union[str, os.PathLike]) -> Optional[Tech]:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    for profile in PROFILES:
        if ext in profile.file_extensions:
            return profile.tech
    return None


def parse(source: str, tech: Union[Tech, str]) -> IRScript:
    tech = Tech(tech)
    if tech is Tech.ANSIBLE:
        return parse_ansible(source)
    return parse_puppet(source)


__all__ = ["ParseError", "PROFILES", "TechProfile", "detect_tech", "parse", "parse_ansible", "parse_puppet"]
