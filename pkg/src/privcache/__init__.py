"""Zero-leakage variable-length coding for cache-aided delivery.

The pipeline: coded-caching placement and delivery produce a message ``C``
per demand vector; a greedy coupling of ``P_{C|X}`` yields a variable ``U``
independent of the private symbol ``X`` with ``C = f(U, X)``; the response is
a one-time pad of ``X`` followed by a prefix codeword of ``U``.  Exact
rational arithmetic certifies zero leakage and losslessness, and
:mod:`privcache.bounds` evaluates the achievable average lengths.
"""

__version__ = "0.1.0"

from .bounds import BoundEntry, BoundName, BoundReport, evaluate_all, evaluate_bounds
from .caching import CachingParams, delivery, induced_joint, make_params, placement, user_decode
from .codec import (
    PrefixCode,
    SharedKey,
    TwoPartCodeword,
    build_prefix_code,
    decode_response,
    encode_response,
    exact_expected_length,
    exact_leakage,
    otp_decrypt,
    otp_encrypt,
    verify_lossless,
)
from .common_info import (
    build_axy_bxy,
    enumerate_polytope,
    k_min_entropy,
    membership_phat,
    solve_g0,
    verify_optimizer,
)
from .config import example_path, load_scenario, parse_scenario
from .coupling import functional_representation, greedy_coupling, greedy_qstar, verify_u_constraints
from .errors import (
    DecodeFailure,
    EncodingError,
    IndivisibleFile,
    KeyMismatch,
    NotApplicable,
    PrivCacheError,
    SizeLimit,
    UnsupportedMemoryPoint,
    ValidationError,
)
from .prob import (
    ConditionalKernel,
    FiniteDistribution,
    JointTable,
    conditional_entropy,
    entropy,
    majorization_glb,
    mutual_information,
    push_forward,
)
from .scheme import Scenario
