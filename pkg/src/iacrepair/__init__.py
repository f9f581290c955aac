"""Static repair of Ansible and Puppet scripts against a desired system state."""

__version__ = "0.1.0"

from .frontends import ParseError, detect_tech, parse
from .infer import CapacityError, InferenceError, infer_from_trace, infer_states
from .ir import Tech
from .normalize import default_db, denormalize, normalize_script
from .patcher import apply_patches, patch_source, render_edits, unified_diff
from .repair import RepairConfig, RepairSolution, RepairTimeout, collect_sites, repair, verify_solution
from .state import ResourceState, SystemState, make_state, parse_state, satisfies

__all__ = [
    "CapacityError", "InferenceError", "ParseError", "RepairConfig", "RepairSolution", "RepairTimeout",
    "ResourceState", "SystemState", "Tech", "apply_patches", "collect_sites", "default_db", "denormalize",
    "detect_tech", "infer_from_trace", "infer_states", "make_state", "normalize_script", "parse",
    "parse_state", "patch_source", "render_edits", "repair", "satisfies", "unified_diff", "verify_solution",
]
