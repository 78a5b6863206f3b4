"""LP extremes of S'_exp for both audit modes and all four outcome selectors."""

from extch.core import ALL_SELECTORS
from extch.lhv_audit import AuditMode, run_audit, verify_certificate

if __name__ == "__main__":
    print(f"{'mode':<14}{'r':>3}{'q':>3}{'min':>10}{'max':>10}  certified")
    for mode in AuditMode:
        for sel in ALL_SELECTORS:
            res = run_audit(mode, sel)
            ok = all(verify_certificate(c, res.problem).passed for c in (res.maximum, res.minimum))
            print(
                f"{mode.value:<14}{sel.r:>+3d}{sel.q:>+3d}"
                f"{res.minimum.objective_value:>10.6f}{res.maximum.objective_value:>10.6f}  {ok}"
            )
