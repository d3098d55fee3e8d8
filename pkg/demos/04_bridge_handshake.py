"""Score an external method through the prediction bridge.

The bridge is the whole integration contract: the method reads the
manifest, writes predictions for the test split into a directory, and the
evaluator scores that directory. No shared code, no imports, just files.

The "method" here is grey-world applied out of process, plus a deliberate
mistake at the end to show the bridge refusing a bad delivery.
"""

import json
import os

import numpy as np

import ccbench as cb
from ccbench.errors import BridgeError

base = os.path.join(os.path.dirname(__file__), "demo_out")
ds_dir = os.path.join(base, "bridge_ds")

e = cb.Illuminant(0.7, 1.0, 0.8)
cfg = cb.SynthConfig(96, 96, 50, cb.AlbedoDistribution.UNIFORM_RGB, (e,), seed=8)
manifest = cb.emit_dataset(cfg, 20, ds_dir)
split = cb.split_manifest(manifest, 0)

# --- the external side: estimate a triple per test image, write JSON
bridge = os.path.join(base, "bridge_preds")
os.makedirs(bridge, exist_ok=True)
entries = {}
for rec in split.test_samples(manifest):
    img = cb.load_sample(rec)
    means = [float(img.data[..., c][img.mask].mean()) for c in range(3)]
    entries[rec.id] = list(np.asarray(means) / np.linalg.norm(means))
with open(os.path.join(bridge, "predictions.json"), "w", encoding="utf-8") as fh:
    json.dump({"model_name": "external_grey_world",
               "kind": "illuminant_triple",
               "entries": entries}, fh, indent=2)
print(f"external method wrote {len(entries)} predictions to {bridge}")

# --- the benchmark side
preds = cb.load_predictions(bridge, manifest, split)
run = cb.evaluate(manifest, split, preds)
print()
print(cb.render_report(run))

# an incomplete delivery is rejected before any scoring
victim = sorted(entries)[0]
del entries[victim]
with open(os.path.join(bridge, "predictions.json"), "w", encoding="utf-8") as fh:
    json.dump({"model_name": "external_grey_world",
               "kind": "illuminant_triple",
               "entries": entries}, fh, indent=2)
try:
    cb.load_predictions(bridge, manifest, split)
except BridgeError as err:
    print(f"dropped {victim!r} on purpose -> BridgeError: {err}")
