"""Kernel backend selection: compiled extension when built, else pure Python.

Import-time choice; `BACKEND` reports which lane is active.  Both lanes
implement identical signatures and produce identical integer outputs, so
everything above this module is backend-agnostic.
"""

try:
    from satocensus import _kernels_c as _impl

    BACKEND = "c"
except ImportError:  # extension not built
    from satocensus import _kernels_py as _impl

    BACKEND = "python"

from satocensus import _kernels_py as _pure

curve_trace = _impl.curve_trace
inverse_table = _impl.inverse_table
generic_j_hist = _impl.generic_j_hist
pair_census_hists = _impl.pair_census_hists
hurwitz6 = _impl.hurwitz6
vlk_histogram = _impl.vlk_histogram
dinic_maxflow = _impl.dinic_maxflow
transport_cost = _impl.transport_cost

# The compiled hurwitz kernel works in int64; fall back to big-int Python
# past this bound (|b^2 - delta| must stay below 2^63).
HURWITZ_INT64_LIMIT = 2**61


def hurwitz6_any(delta: int) -> int:
    if BACKEND == "c" and -delta < HURWITZ_INT64_LIMIT:
        return hurwitz6(delta)
    return _pure.hurwitz6(delta)
