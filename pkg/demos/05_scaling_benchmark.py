"""
Scaling benchmark
=================

Time mask generation plus application over batch sizes and over image
sizes, then fit log(time) = beta * log(size) + c.  beta near 1 means the
cost grows linearly.  Samples and fits go to ``demos/out``.
"""

from pathlib import Path

from gbgm.bench import describe, emit_csv, fit_scaling, pixel_scaling, run_bench

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

fits, samples = [], []
for method in ("gbgm", "erasing", "gridmask", "has"):
    run = run_bench(method, batch_sizes=(1, 2, 4, 8, 16, 32), resolution=224, repeats=5, seed=0)
    samples += run
    fits.append(fit_scaling(run))
    print(describe(fits[-1]))

# pixel scaling keeps the block grids fixed (s1 = side / 8) and grows the side
print(describe(pixel_scaling("gbgm", (64, 128, 256, 512), repeats=5)))

emit_csv(samples, out / "bench_samples.csv")
emit_csv(fits, out / "bench_fits.csv")
print("wrote", out / "bench_samples.csv", "and", out / "bench_fits.csv")
