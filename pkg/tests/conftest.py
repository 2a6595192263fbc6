import pytest

from normcheck.bundled import PRIVACY_RUN, privacy_norms, privacy_ts
from normcheck.traces import trace_from_path


@pytest.fixture(scope="session")
def privacy():
    """(transition system, norm set, scenario run trace) for the bundled case."""
    ts = privacy_ts()
    ns = privacy_norms()
    trace = trace_from_path(ts, *PRIVACY_RUN)
    return ts, ns, trace
