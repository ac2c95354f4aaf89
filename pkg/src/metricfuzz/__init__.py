"""Parse, sensitivity-check, run and metrically test Fuzz programs."""

from .checker import TypingResult, check_program, infer
from .evaluator import FuelExhausted, Stuck, Terminated, apply_value, evaluate
from .extreal import INF, ONE, ZERO, ExtReal, add, div_ceil, leq, mul
from .generate import GenConfig, gen_nearby_pair, gen_value
from .harness import check_fix_bound, check_metric_preservation
from .metrics import DistanceResult, MetricConfig, env_distance, value_distance
from .parser import Program, parse_program, parse_term, pretty
from .syntax import add_env, join_env, scale_env, well_formed

__version__ = "0.1.0"
