"""Regenerate the shipped .cir data files from the bench builders."""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from sfqsim import bench

DATA = pathlib.Path(__file__).resolve().parents[1] / "src" / "sfqsim" / "data"

FILES = {
    "single_jj_tb.cir": bench.single_junction_tb(),
    "jtl_chain_tb.cir": bench.jtl_chain_tb(n_pulses=3),
    "storage_loop_tb.cir": bench.storage_loop_tb(n_sets=1, multi=False),
    "mndro_loop_tb.cir": bench.storage_loop_tb(n_sets=3, multi=True),
    "mcg_tb.cir": bench.mcg_tb(),
    "ndro_cell_tb.cir": bench.rdff_cell_tb(bench.NDRO_PARAMS, "ndro"),
    "mndro_cell_tb.cir": bench.rdff_cell_tb(bench.MNDRO_PARAMS, "mndro"),
}


def main():
    for name, text in FILES.items():
        (DATA / name).write_text(text, encoding="utf-8")
        print(f"wrote {DATA / name}")


if __name__ == "__main__":
    main()
