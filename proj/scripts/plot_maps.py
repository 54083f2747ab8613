#!/usr/bin/env python3
"""Plot coincidence maps and wrapped phase from shom output directories.

Each directory gives one row of panels: the pixel-resolved theory map, the
measured covariance map (if present) and phi_s mod 2 pi.

    scripts/plot_maps.py out/t188 out/t174 out/t86 -o maps.png
"""
import argparse
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


def read_matrix(path):
    with open(path) as f:
        lines = [l for l in f if not l.startswith("#")]
    plus = np.array(lines[0].split(",")[1:], dtype=float)
    minus = np.array(lines[1].split(",")[1:], dtype=float)
    values = np.array([l.split(",") for l in lines[2:] if l.strip()], dtype=float)
    return plus, minus, values


def read_profile(path):
    data = np.genfromtxt(path, delimiter=",", names=True)
    return data["lambda_nm"], data["phase_rad"]


def extent(plus, minus):
    dp = plus[1] - plus[0]
    dm = minus[1] - minus[0]
    return [minus[0] - dm / 2, minus[-1] + dm / 2, plus[0] - dp / 2, plus[-1] + dp / 2]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dirs", nargs="+")
    ap.add_argument("-o", "--output", default="maps.png")
    args = ap.parse_args()

    fig, axes = plt.subplots(len(args.dirs), 3, figsize=(13, 4 * len(args.dirs)), squeeze=False)
    for row, d in zip(axes, args.dirs):
        plus, minus, theory = read_matrix(os.path.join(d, "pc_resolved.csv"))
        row[0].imshow(theory, origin="lower", extent=extent(plus, minus), aspect="equal", cmap="magma")
        row[0].set_title(f"{os.path.basename(d.rstrip('/'))}: theory")

        cov_path = os.path.join(d, "covariance.csv")
        if os.path.exists(cov_path):
            plus, minus, cov = read_matrix(cov_path)
            row[1].imshow(cov, origin="lower", extent=extent(plus, minus), aspect="equal", cmap="magma")
            row[1].set_title("covariance")
        else:
            row[1].axis("off")

        lam, phase = read_profile(os.path.join(d, "phase_mod2pi.csv"))
        row[2].plot(lam, phase, ".", ms=3)
        row[2].set_ylim(0, 2 * np.pi)
        row[2].set_title("phase mod 2 pi")
        row[2].set_xlabel("wavelength (nm)")
        for ax in row[:2]:
            ax.set_xlabel("lambda_- (nm)")
            ax.set_ylabel("lambda_+ (nm)")

    fig.tight_layout()
    fig.savefig(args.output, dpi=120)


if __name__ == "__main__":
    main()
