"""Build a strip cocycle on every top arc system of a pair of pants, check
its admissibility and recover the weights by inverting the strip map."""

import argparse

import numpy as np

from lorentz_geom.lengths import admissibility_test
from lorentz_geom.schottky import pants
from lorentz_geom.strips import StripAtlas, SurfaceModel, invert_strip_map, strip_cocycle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", type=float, nargs=3, default=[2.0, 3.0, 2.5])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    surf = pants(tuple(args.lengths))
    atlas = StripAtlas(SurfaceModel(surf))
    rng = np.random.default_rng(args.seed)
    for k, ss in enumerate(atlas.strips):
        w = rng.uniform(0.1, 1.0, len(ss.arcs))
        u = strip_cocycle(ss, w)
        verdict = admissibility_test(surf.rep, u).verdict
        r = invert_strip_map(atlas, u)
        got = dict(zip((a.label for a in r.arcs), r.weights))
        err = max(abs(got.get(a.label, 0.0) - x) for a, x in zip(ss.arcs, w / w.sum()))
        print(f"system {k}: {[a.label for a in ss.arcs]}  {verdict}  weight error {err:.2e}")


if __name__ == "__main__":
    main()
