"""(k+2, k, 2) MDS array codes with repair-matrix driven single-node repair."""

from .code import CodeSpec, Stripe, decode_erasures, encode, mds_check, verify_stripe
from .constructions import build, build_c1, build_c2, group_partition
from .gf import FieldSpec, GF256, binary_field, parse_field, prime_field, primitive_element
from .linalg import Mat
from .oracle import bounds_report, node_optima
from .repair import RepairPlan, RepairStats, execute_repair, helper_payload, plan_repair

__version__ = "0.1.0"

__all__ = [
    "CodeSpec", "Stripe", "decode_erasures", "encode", "mds_check", "verify_stripe",
    "build", "build_c1", "build_c2", "group_partition",
    "FieldSpec", "GF256", "binary_field", "parse_field", "prime_field", "primitive_element",
    "Mat", "bounds_report", "node_optima",
    "RepairPlan", "RepairStats", "execute_repair", "helper_payload", "plan_repair",
]
