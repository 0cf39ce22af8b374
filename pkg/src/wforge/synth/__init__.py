"""Circuit constructions; importing this package registers every macro."""

from .base import Contract, SynthResult, check_contract
from .controlled import (
    ch_phase,
    lax_phase,
    synth_cgp,
    synth_controlled_h,
    synth_controlled_ztau,
    synth_p1,
    synth_phase_gadget,
    synth_point_phase,
    synth_zcx,
)
from .wstates import (
    MAX_WIRES,
    PostSelectionPlan,
    mixed_dims,
    plan_postselected_w,
    run_postselected_w,
    synth_mixed_tree,
    synth_qudit_spread,
    synth_qudit_w_tree,
    synth_spread,
    synth_spread_tree,
    synth_w_prime,
)

__all__ = [
    "Contract",
    "SynthResult",
    "check_contract",
    "ch_phase",
    "lax_phase",
    "synth_cgp",
    "synth_controlled_h",
    "synth_controlled_ztau",
    "synth_p1",
    "synth_phase_gadget",
    "synth_point_phase",
    "synth_zcx",
    "MAX_WIRES",
    "PostSelectionPlan",
    "mixed_dims",
    "plan_postselected_w",
    "run_postselected_w",
    "synth_mixed_tree",
    "synth_qudit_spread",
    "synth_qudit_w_tree",
    "synth_spread",
    "synth_spread_tree",
    "synth_w_prime",
]
