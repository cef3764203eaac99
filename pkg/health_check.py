#!/usr/bin/env python3
"""
Health Check Script for FuzzyCesaro
Reproduces two reference results on a reduced plan
"""
import sys
from pathlib import Path

# Add the project root to Python path
sys.path.insert(0, str(Path(__file__).parent))

CHECK_PLAN = {"t_max": 100.0, "n_steps": 2000}


def check_example_one():
    """sigma(t) of paper-example-1 matches its closed form at t = 10"""
    try:
        from core.functions import lookup
        from core.integration import SamplingPlan, build_trace, cesaro_mean_at
        from core.fuzzy import metric_d

        f = lookup("paper-example-1")
        trace = build_trace(f, SamplingPlan(**CHECK_PLAN))
        expected = f.closed_form_sigma.evaluate(10.0, f.grid)
        return metric_d(cesaro_mean_at(trace, 10.0), expected) <= 1e-6
    except Exception as e:
        print(f"paper-example-1 check failed: {e}")
        return False


def check_example_two():
    """paper-example-2 shows no slow-decrease counterexample"""
    try:
        from core.functions import lookup
        from core.integration import SamplingPlan, build_trace
        from core.tauberian import check_slow_decrease

        trace = build_trace(lookup("paper-example-2"), SamplingPlan(**CHECK_PLAN))
        return check_slow_decrease(trace, 0.5, 1.5, 1.0).passed
    except Exception as e:
        print(f"paper-example-2 check failed: {e}")
        return False


def main():
    """Run all health checks"""
    from loguru import logger

    logger.remove()
    print("FuzzyCesaro Health Check Starting...")

    checks = {
        "paper-example-1 sigma closed form": check_example_one(),
        "paper-example-2 slow decrease": check_example_two(),
    }

    all_passed = True
    for check_name, result in checks.items():
        status = "PASS" if result else "FAIL"
        print(f"{check_name}: {status}")
        if not result:
            all_passed = False

    if all_passed:
        print("All health checks passed!")
        return 0
    print("Some health checks failed!")
    return 1


if __name__ == "__main__":
    sys.exit(main())
