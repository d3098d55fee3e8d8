"""Cast a scene with a colored illuminant, correct it back, recover the
illuminant from the prediction alone.

The diagonal model says an observed image is the canonical scene times a
per-channel gain. Everything downstream leans on that being exactly
invertible, so this script checks the books on one synthetic scene.
"""

import numpy as np

import ccbench as cb

e = cb.Illuminant(0.8, 1.0, 0.6)
cfg = cb.SynthConfig(160, 120, 40, cb.AlbedoDistribution.UNIFORM_RGB, (e,), seed=3)
sample = cb.make_sample(cfg)

print(f"illuminant applied:   {e.as_array()}")

corrected = cb.correct_von_kries(sample.observed, e)
residual = np.abs(corrected.data - sample.canonical.data).max()
print(f"correct_von_kries residual vs canonical: {residual:.2e}")

# recovery only sees the observed image and a white-balanced prediction,
# the same interface an external method is scored through
got = cb.recover_illuminant(sample.observed, sample.canonical)
print(f"illuminant recovered: {got.as_array()} (unit length)")
print(f"angular error: {cb.angular_error(got, e):.2e} deg")

# contaminate 10% of the pixels and watch the median shrug it off
rng = np.random.default_rng(0)
data = np.array(sample.observed.data)
flat = data.reshape(-1, 3)
flat[rng.choice(flat.shape[0], flat.shape[0] // 10, replace=False)] *= 10.0
robust = cb.recover_illuminant(cb.Image(data), sample.canonical,
                               aggregator=cb.Aggregator.MEDIAN)
print(f"with 10% blown-out pixels, median recovery: "
      f"{cb.angular_error(robust, e):.3f} deg")
