"""Build the strip instance (mesh field and macro map) and run the sampled
fibration checks in both modes."""

import argparse
import json

from lorentz_geom.cli import to_py
from lorentz_geom.contraction.instance import build_strip_instance, fibration_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    inst = build_strip_instance()
    for mode in ("macro", "micro"):
        rep = fibration_suite(inst, mode, args.samples, args.seed)
        print(json.dumps(to_py(rep), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
