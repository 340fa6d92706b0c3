#!/usr/bin/env python3
# Copyright 2026 The mmgcoop Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Regenerates paper3mg.json.

CDG limits, tier prices and BESS parameters are published values. Load, PV,
price and price-history series are RECONSTRUCTED: shapes and magnitudes were
chosen to resemble a summer day of wholesale prices and three complementary
microgrids. See README.md in this directory.

Usage: python3 paper3mg_generate.py > paper3mg.json
"""

import json
import math
import random
import sys

T = 24
SEED = 2015
HISTORY_DAYS = 30
ALPHA = 0.9
CONTROLLABLE_SHARE = 0.06


def r1(x):
    return round(x, 1)


def r2(x):
    return round(x, 2)


def bump(t, centre, width):
    return math.exp(-((t - centre) / width) ** 2)


def buy_price(t):
    # Overnight trough near 30, shoulder around 11:00, peak near 17:00.
    return 30.0 + 9.0 * bump(t, 10.5, 3.0) + 24.0 * bump(t, 17.0, 3.2)


def solar(t, size):
    s = math.sin(math.pi * (t - 5.5) / 14.0)
    return size * s if s > 0 else 0.0


def microgrid(name, p_max, tiers, base, pv_size, rng):
    fixed, con, upper, pv, pv_lo = [], [], [], [], []
    for t in range(T):
        total = base(t) * rng.uniform(0.98, 1.02)
        c = total * CONTROLLABLE_SHARE
        fixed.append(r1(total - c))
        con.append(r1(c))
        upper.append(r1(total * 1.05))
        p = solar(t, pv_size)
        pv.append(r1(p))
        pv_lo.append(r1(0.9 * p))
    inflow = r1(sum(con) / T)
    return {
        "name": name,
        "cdg": {
            "p_min": 0,
            "p_max": p_max,
            "tiers": [{"upper": u, "price": c} for u, c in tiers],
        },
        "bess": {
            "capacity": 200,
            "converter_efficiency": 0.98,
            "converter_capacity": 200,
            "loss_charge": 0.03,
            "loss_discharge": 0.03,
            "self_discharge_rate": 0.0,
            "soc_initial": 0.25,
        },
        "load": {
            "fixed": fixed,
            "controllable": con,
            "inflow_max": [inflow] * T,
            "upper_bound": upper,
        },
        "pv": {"forecast": pv, "lower_bound": pv_lo},
    }


def history(rng, base, level_sigma, noise_sigma):
    days = []
    for _ in range(HISTORY_DAYS):
        level = rng.gauss(0.0, level_sigma)
        forecast, actual = [], []
        for b in base:
            f = b * rng.uniform(0.97, 1.03)
            forecast.append(r2(f))
            actual.append(r2(f + level + rng.gauss(0.0, noise_sigma)))
        days.append({"actual": actual, "forecast": forecast})
    return {"alpha": ALPHA, "days": days}


def main():
    rng = random.Random(SEED)
    buy = [r2(buy_price(t) * rng.uniform(0.98, 1.02)) for t in range(T)]
    sell = [r2(0.8 * b) for b in buy]

    # MG1: daytime commercial load with a large PV array.
    mg1 = microgrid(
        "MG1", 500, [(200, 25), (400, 41), (500, 60)],
        lambda t: 560 + 160 * bump(t, 13.0, 4.0), 800, rng)
    # MG2: residential, evening peak, little PV.
    mg2 = microgrid(
        "MG2", 600, [(200, 25), (400, 39), (600, 57)],
        lambda t: 620 + 520 * bump(t, 19.0, 3.0) + 120 * bump(t, 8.0, 2.0), 120, rng)
    # MG3: light load next to the cheapest generator, so it runs a surplus.
    mg3 = microgrid(
        "MG3", 550, [(200, 16), (400, 21), (550, 26)],
        lambda t: 330 + 90 * bump(t, 15.0, 5.0), 150, rng)

    doc = {
        "horizon": {"num_periods": T, "period_hours": 1.0},
        "microgrids": [mg1, mg2, mg3],
        "prices": {"buy": buy, "sell": sell},
        "buy_history": history(rng, buy, 0.35, 0.8),
        "sell_history": history(rng, sell, 0.3, 0.7),
        "risk_weight": 0.001,
        "options": {
            "worst_case": True,
            "dr_objective_term": True,
            "cdg_pricing": "block",
            "paper_literal_risk": False,
            "terminal_soc": False,
        },
    }
    json.dump(doc, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
