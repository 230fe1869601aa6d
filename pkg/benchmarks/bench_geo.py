"""Benchmark the geodesic point-to-polyline kernel: compiled vs pure Python.

The workload mirrors image matching during ingest: many (image, road)
distance queries against short urban polylines. Both backends are imported
directly so one process can time them side by side.

Usage: python3 benchmarks/bench_geo.py [--queries N] [--repeat K]
"""

import argparse
import random
import statistics
import time

from tagscout.geo import _pygeo

try:
    from tagscout.geo import _cgeo
except ImportError:
    _cgeo = None


def make_workload(n_roads: int, n_images: int, seed: int = 1):
    rng = random.Random(seed)
    polylines = []
    for _ in range(n_roads):
        x = -80.23 + rng.random() * 0.05
        y = 25.74 + rng.random() * 0.05
        coords = [(x, y)]
        for _ in range(rng.randint(1, 6)):
            x += rng.uniform(-0.002, 0.002)
            y += rng.uniform(-0.002, 0.002)
            coords.append((x, y))
        polylines.append(coords)
    points = [
        (-80.24 + rng.random() * 0.07, 25.73 + rng.random() * 0.07)
        for _ in range(n_images)
    ]
    return polylines, points


def run_backend(impl, polylines, points) -> tuple[float, float]:
    start = time.perf_counter()
    acc = 0.0
    for coords in polylines:
        for lon, lat in points:
            acc += impl.point_polyline_m(lon, lat, coords)
    return time.perf_counter() - start, acc


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--roads", type=int, default=100)
    ap.add_argument("--images", type=int, default=500)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    polylines, points = make_workload(args.roads, args.images)
    n_queries = args.roads * args.images
    print(f"workload: {args.roads} polylines x {args.images} points "
          f"= {n_queries} distance queries, best of {args.repeat}")

    backends = [("python", _pygeo)]
    if _cgeo is not None:
        backends.insert(0, ("c", _cgeo))
    else:
        print("compiled backend unavailable; timing pure Python only")

    results = {}
    checksums = {}
    for name, impl in backends:
        times = []
        for _ in range(args.repeat):
            elapsed, acc = run_backend(impl, polylines, points)
            times.append(elapsed)
            checksums[name] = acc
        best = min(times)
        results[name] = best
        rate = n_queries / best
        print(f"  {name:>6}: {best:.3f}s best ({statistics.mean(times):.3f}s mean), "
              f"{rate:,.0f} queries/s")

    if len(results) == 2:
        speedup = results["python"] / results["c"]
        drift = abs(checksums["c"] - checksums["python"])
        print(f"speedup: {speedup:.1f}x (compiled over pure Python)")
        print(f"checksum drift: {drift:.2e} m over {n_queries} queries")


if __name__ == "__main__":
    main()
