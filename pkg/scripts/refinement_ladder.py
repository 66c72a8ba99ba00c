#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Script: refinement_ladder.py
Description:
    Verfeinerungsleitern gegen die geschlossene Stromfunktions-Lösung:
    --target oracle (FD-Orakel) oder --target freeslip (semi-analytischer Löser).
    Schreibt refinement.csv (Auflösung, Fehler, beobachtete Ordnung) und gibt
    eine Tabelle aus. Die Auflösungen laufen parallel (WEDGE_STOKES_THREADS).
"""

import logging
import os
import sys

# ─────────────────────────────────────────────
# 🧩 Projektpfad einbinden
# ─────────────────────────────────────────────
BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
sys.path.append(BASE_DIR)

import click
import numpy as np
from tabulate import tabulate

from models.config import GridSpec, WedgeConfig
from models.fields import Grid
from solver.freeslip import freeslip_solve
from solver.manufactured import StreamCase
from solver.oracle import TruncatedWedge, buffered_region, compare, fd_solve, observed_order
from utils.field_io import write_table
from utils.workers import map_ordered

logger = logging.getLogger("refinement_ladder")


def ladder(theta: float, r_in: float, r_out: float, levels: int, alpha: float):
    case = StreamCase()
    base = TruncatedWedge(theta, r_in, r_out, 64, 32, "reference", case.velocity(theta))
    domains = [base]
    for _ in range(levels - 1):
        domains.append(domains[-1].refined())
    region = buffered_region(base)

    def error(domain: TruncatedWedge) -> float:
        u, _ = fd_solve(case.forcing(theta), case.navier_data(theta), domain)
        exact = case.on_grid(u.grid).u
        return compare(u, exact, region, "field_alpha", alpha, relative=True)

    errors = map_ordered(error, domains)
    orders = [float("nan")] + observed_order(errors)
    return [(d.n_radial, d.n_angular, e, o) for d, e, o in zip(domains, errors, orders)]


def freeslip_ladder(theta: float, levels: int, alpha: float):
    """Free-Slip-Löser gegen die geschlossene Lösung, Winkelauflösung verdoppelt je Stufe."""
    case = StreamCase(pressure_amplitude=0.5)
    specs = [GridSpec(s_min=-8.0, s_max=8.0, n_radial=128, n_angular=16 * 2**k + 1) for k in range(levels)]

    def error(spec: GridSpec) -> float:
        config = WedgeConfig.build(theta=theta, alpha=alpha, grid=spec)
        manufactured = case.on_grid(Grid.from_spec(spec, theta))
        u, _, _, _ = freeslip_solve(manufactured.f, manufactured.g_frak, 0, config, max_workers=1)
        return float(np.max(np.abs(u.stacked() - manufactured.u.stacked())) / np.max(np.abs(manufactured.u.stacked())))

    errors = map_ordered(error, specs)
    orders = [float("nan")] + observed_order(errors)
    return [(s.n_radial, s.n_angular, e, o) for s, e, o in zip(specs, errors, orders)]


@click.command()
@click.option("--theta", type=float, default=0.8)
@click.option("--r-in", "r_in", type=float, default=0.2)
@click.option("--r-out", "r_out", type=float, default=5.0)
@click.option("--levels", type=int, default=3)
@click.option("--alpha", type=float, default=-0.05)
@click.option("--target", type=click.Choice(["oracle", "freeslip"]), default="oracle")
@click.option("--out", default="refinement.csv", type=click.Path(dir_okay=False))
def main(theta: float, r_in: float, r_out: float, levels: int, alpha: float, target: str, out: str) -> None:
    """Verfeinerungsleiter gegen die geschlossene Lösung."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    header = ["n_radial", "n_angular", "rel_error", "order"]
    rows = ladder(theta, r_in, r_out, levels, alpha) if target == "oracle" else freeslip_ladder(theta, levels, alpha)
    click.echo(tabulate(rows, headers=header, tablefmt="github", floatfmt=".3e"))
    write_table(out, header, rows)
    logger.info(f"📁 Tabelle geschrieben: {out}")


if __name__ == "__main__":
    main()
