"""Regenerate the bundled miniature count traces.

Writes three small view-count catalogs under src/cachecost/data/. Each
file is a count trace (movie,upload_time,total_views,horizon) whose view
totals follow a power law, so the per-item request rates span both sides
of the storage/compute break-even once an ad overlay splits them further.

The output is fully determined by the constants below; rerunning the
script reproduces the files byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "cachecost" / "data"

CATALOGS = {
    # title catalog with simultaneous availability and heavy reuse
    "vod_premium.csv": dict(
        movies=300, exponent=1.1, total_views=60_000, horizon=8000.0,
        upload_spread=0.0, seed=90_101,
    ),
    # larger catalog of user uploads arriving throughout the window
    "ugc_large.csv": dict(
        movies=400, exponent=1.05, total_views=40_000, horizon=10_000.0,
        upload_spread=6000.0, seed=90_102,
    ),
    # small catalog, long window, mostly cold items
    "ugc_small.csv": dict(
        movies=150, exponent=1.3, total_views=15_000, horizon=12_000.0,
        upload_spread=3000.0, seed=90_103,
    ),
}


def _make_catalog(movies, exponent, total_views, horizon, upload_spread, seed):
    ranks = np.arange(1, movies + 1, dtype=float)
    weights = ranks ** -exponent
    views = np.round(total_views * weights / weights.sum()).astype(int)
    rng = np.random.default_rng(seed)
    if upload_spread > 0.0:
        uploads = np.round(rng.uniform(0.0, upload_spread, size=movies), 1)
    else:
        uploads = np.zeros(movies)
    # shuffle so rank is not readable off the movie id
    order = rng.permutation(movies)
    lines = ["# movie,upload_time,total_views,horizon"]
    for movie_id, idx in enumerate(order, start=1):
        lines.append(f"{movie_id},{uploads[idx]:.1f},{views[idx]},{horizon:.1f}")
    return "\n".join(lines) + "\n"


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    for name, params in CATALOGS.items():
        text = _make_catalog(**params)
        (DATA_DIR / name).write_text(text, encoding="utf-8")
        rows = text.count("\n") - 1
        print(f"wrote {name}: {rows} movies")


if __name__ == "__main__":
    main()
