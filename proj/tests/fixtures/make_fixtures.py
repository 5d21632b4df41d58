#!/usr/bin/env python3
"""Regenerates the CSV fixtures used by the test suites.

The files are committed; rerun this only when the scenarios change.
"""
import os

HERE = os.path.dirname(os.path.abspath(__file__))

# Deterministic sub-percent noise pattern. Mean ~8e-4, stddev ~2.6e-4, so a
# 2% move scores far above the z threshold while ordinary cycles stay below.
NOISE = [0.0005, 0.0010, 0.0007, 0.0012, 0.0006, 0.0011, 0.0008, 0.0004,
         0.0009, 0.0013, 0.0005, 0.0008, 0.0011, 0.0006, 0.0010, 0.0007]


def walk(start, n, spikes=None, drift_after=None):
    """Price path with alternating-sign noise and optional spike cycles.

    spikes: {cycle_index: signed_return}
    drift_after: (cycle_index, per_cycle_return) applied from that cycle on.
    """
    spikes = spikes or {}
    prices = [start]
    p = start
    for i in range(1, n):
        if i in spikes:
            r = spikes[i]
        else:
            r = NOISE[i % len(NOISE)] * (1 if i % 2 == 0 else -1)
            if drift_after and i >= drift_after[0]:
                r = drift_after[1]
        p = p * (1.0 + r)
        prices.append(round(p, 8))
    return prices


def write_csv(name, assets_prices, t0=60, step=60):
    path = os.path.join(HERE, name)
    n = max(len(p) for p in assets_prices.values())
    with open(path, "w") as f:
        f.write("timestamp,asset,price,volume\n")
        for i in range(n):
            ts = t0 + i * step
            for asset in sorted(assets_prices):
                prices = assets_prices[asset]
                if i < len(prices):
                    f.write(f"{ts},{asset},{prices[i]:.8f},{100 + i}\n")
    print("wrote", path)


def main():
    n = 80
    # Two simultaneous spikes at cycle 45; ZED decorrelates from BTC by
    # construction (different noise phase + later drift), then sells off so
    # the opened long position hits its stop.
    btc = walk(50000.0, n, spikes={45: 0.02})
    zed = walk(2.0, n, spikes={45: 0.02}, drift_after=(50, -0.004))
    # ZED leads BTC by one noise slot so the raw price windows decorrelate.
    zed = [round(z * (1 + NOISE[(i + 5) % len(NOISE)] * (1 if i % 3 else -1)), 8)
           for i, z in enumerate(zed)]
    write_csv("two_asset_spike.csv", {"BTC": btc, "ZED": zed})

    # Restart scenario: spike arrives at cycle 45; the kill point in the test
    # is cycle 44, so the very first post-restart cycle must trigger on z.
    aaa = walk(10.0, n, spikes={45: 0.02})
    bbb = walk(500.0, n)
    write_csv("restart_spike.csv", {"AAA": aaa, "BBB": bbb})

    # Quiet two-asset file: no spikes at all, nothing should trigger on z.
    write_csv("quiet.csv", {"BTC": walk(50000.0, 40), "ETH": walk(3000.0, 40)})

    # Missing-row scenario: ETH has a gap at one timestamp.
    btc2 = walk(50000.0, 6)
    path = os.path.join(HERE, "gap.csv")
    with open(path, "w") as f:
        f.write("timestamp,asset,price,volume\n")
        eth = walk(3000.0, 6)
        for i in range(6):
            ts = 60 + i * 60
            f.write(f"{ts},BTC,{btc2[i]:.8f},{100 + i}\n")
            if i != 2:  # ETH skips t=180
                f.write(f"{ts},ETH,{eth[i]:.8f},{100 + i}\n")
    print("wrote", path)

    # Orderbook columns present.
    path = os.path.join(HERE, "with_book.csv")
    with open(path, "w") as f:
        f.write("timestamp,asset,price,volume,best_bid,best_ask,bid_depth,ask_depth,funding_rate\n")
        prices = walk(100.0, 25)
        for i, p in enumerate(prices):
            ts = 60 + i * 60
            f.write(f"{ts},BTC,{p:.8f},{50 + i},{p * 0.999:.8f},{p * 1.001:.8f},"
                    f"1000,1200,0.0001\n")
    print("wrote", path)


if __name__ == "__main__":
    main()
