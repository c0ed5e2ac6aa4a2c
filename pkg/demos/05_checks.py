"""Run the named bounded checks and show their reports."""
import json

from pclone.verify import CHECKS, run_check

for cid in ["lemma-trivial", "maj-generates", "palfy", "final-example", "strj-total-part"]:
    rep = run_check(cid)
    print(rep.summary(), f"{rep.millis} ms")

rep = run_check("ludiet-strictness")
print(json.dumps(rep.witnesses, indent=1)[:400])
print(len(CHECKS), "checks available; try `pclone verify --check all`")
