"""Binary hypervector algebra with non-associative sequence memory.

The package splits into the algebra itself and a harness around it:

* :mod:`hdmem.core`        bit-packed states, binding, bundling,
                           distance, activity, deterministic RNG streams
* :mod:`hdmem.sequences`   left/right folds, position-marker, chaining
                           and cue-based encodings
* :mod:`hdmem.info`        joint distributions, exact and approximate
                           mutual information, ranked retrieval profiles
* :mod:`hdmem.images`      binary images as states (IDX in, PGM out)
* :mod:`hdmem.experiments` seeded experiment runners and result emission
* :mod:`hdmem.cli`         the ``hdmem`` command
"""

__version__ = "0.1.0"

from .core import (
    AlgebraParams,
    FileFormatError,
    RngStream,
    State,
    asymptotic_activity,
    bind,
    bundle,
    distance,
    expected_bundle_activity,
    load_state,
    mean_activity,
    one_vector,
    perturb,
    random_qstate,
    save_state,
)
from .info import (
    JointTable,
    MIProfile,
    approx_mi_from_distance,
    joint_distribution,
    mi_memory,
    mi_profile,
    mutual_information_approx,
    mutual_information_exact,
)
from .sequences import (
    EncodedSequence,
    LeftFoldAccumulator,
    MemoryState,
    cue,
    encode_chaining,
    encode_plain,
    encode_position_markers,
    l_state,
    memory_state,
    r_state,
)

__all__ = [
    "AlgebraParams",
    "EncodedSequence",
    "FileFormatError",
    "JointTable",
    "LeftFoldAccumulator",
    "MIProfile",
    "MemoryState",
    "RngStream",
    "State",
    "__version__",
    "approx_mi_from_distance",
    "asymptotic_activity",
    "bind",
    "bundle",
    "cue",
    "distance",
    "encode_chaining",
    "encode_plain",
    "encode_position_markers",
    "expected_bundle_activity",
    "joint_distribution",
    "l_state",
    "load_state",
    "mean_activity",
    "memory_state",
    "mi_memory",
    "mi_profile",
    "mutual_information_approx",
    "mutual_information_exact",
    "one_vector",
    "perturb",
    "r_state",
    "random_qstate",
    "save_state",
]
