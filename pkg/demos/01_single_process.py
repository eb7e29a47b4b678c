"""
One process, one auditable event
================================

The smallest system there is: a single process that is its own leader.
We inject one auditable event, let the environment authorize the restore
as soon as the system is auditable, and read the step log.
"""

from arsim.io import render_trace_text, trace_to_dict
from arsim.model import Mode, Topology
from arsim.simulator import Injection, Scenario, run
from arsim.checker.traces import check_two_phase

# %%
# A scenario is plain data.  ``on_s2`` means the operator signs off the
# moment every process has seen the event.
sc = Scenario(Topology(1, frozenset()), Mode("unbounded", 1),
              injections=(Injection(0, "ae", 0),), authorize="on_s2", max_steps=12)
trace = run(sc)
print(render_trace_text(trace_to_dict(trace)))

# %%
# Detection (AR1), the bottom wave (AR3), the top wave (AR5), then the
# restore (AR7, AR9).  The run idles once it is Stable again.
rep = check_two_phase(trace)
print(rep.verdict, rep.witness)
