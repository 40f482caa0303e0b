"""Regenerate tests/fixtures/mc_oracle.json.

Runs the Monte-Carlo reference on the standard grid plus the pinned oracle
point and records the reduced-route ratios. Takes about a minute.
"""

import json
import pathlib

from udwcov.violation import calibrate_prefactors, config_from_triple, trace_e_reference_mc

OUT = pathlib.Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "mc_oracle.json"

PIN_SAMPLES = 2 * 10**7
PIN_SEED = 20241018


def main():
    oracle = trace_e_reference_mc(config_from_triple(0.9, 10.0, 1.0), samples=PIN_SAMPLES, seed=PIN_SEED)
    grid = calibrate_prefactors(samples=10**7, seed=PIN_SEED)
    payload = {
        "oracle": {"v": 0.9, "t_switch": 10.0, "ell": 1.0, "omega": 0.1,
                   "samples": PIN_SAMPLES, "seed": PIN_SEED,
                   "im_value": oracle.imag, "std_error": oracle.error_estimate},
        "calibration": grid,
    }
    OUT.write_text(json.dumps(payload, indent=2) + "\n")
    print(json.dumps(payload["oracle"], indent=2))
    for row in grid:
        print({k: (round(v, 6) if isinstance(v, float) else v) for k, v in row.items()})


if __name__ == "__main__":
    main()
