"""Named weight sequences, addressable as ``name`` or ``name:param``."""
import numpy as np

from .errors import SchemaError
from .seqcore import DEFAULT_N, LogSeq, log_factorial


def _k(n):
    return np.arange(n + 1, dtype=np.float64)


def factorial(n):
    return log_factorial(n)


def gevrey(n, s=1.0):
    """``M_k = k!^(s+1)``."""
    return (s + 1.0) * log_factorial(n)


def exp_quadratic(n):
    return _k(n) ** 2


def exp_power(n, p=2.0):
    return _k(n) ** p


def constant_one(n):
    return np.zeros(n + 1)


def geometric(n, q=2.0):
    return _k(n) * np.log(q)


def alternating(n, K=10.0):
    """``M_k = k! K^(k mod 2)``: ``m`` alternates between 1 and K."""
    k = np.arange(n + 1)
    return log_factorial(n) + (k % 2) * np.log(K)


def loglog(n, s=1.0):
    """``M_k = k! log(k+e)^(s k)``, a quasianalytic-type sequence between k! and Gevrey."""
    k = _k(n)
    return log_factorial(n) + s * k * np.log(np.log(k + np.e))


SEQUENCES = {
    "factorial": (factorial, None),
    "gevrey": (gevrey, 1.0),
    "exp_quadratic": (exp_quadratic, None),
    "exp_power": (exp_power, 2.0),
    "constant_one": (constant_one, None),
    "geometric": (geometric, 2.0),
    "alternating": (alternating, 10.0),
    "loglog": (loglog, 1.0),
}

# the standing test catalog: every entry is exercised by the implication suite
DEFAULT_CATALOG = (
    "factorial", "gevrey:0.5", "gevrey:1", "gevrey:2", "gevrey:3", "exp_quadratic",
    "exp_power:1.5", "constant_one", "geometric:2", "alternating:5", "loglog:1",
)


def parse_name(name: str):
    base, _, arg = name.partition(":")
    if base not in SEQUENCES:
        raise SchemaError(f"unknown sequence {base!r}; known: {', '.join(sorted(SEQUENCES))}")
    fn, default = SEQUENCES[base]
    if arg and default is None:
        raise SchemaError(f"sequence {base!r} takes no parameter")
    try:
        param = float(arg) if arg else default
    except ValueError:
        raise SchemaError(f"bad parameter in {name!r}") from None
    return fn, param


def sequence(name: str, n: int = DEFAULT_N) -> LogSeq:
    fn, param = parse_name(name)
    vals = fn(n) if param is None else fn(n, param)
    return LogSeq(vals, name)


def catalog(n: int = DEFAULT_N, names=DEFAULT_CATALOG):
    return [sequence(nm, n) for nm in names]
