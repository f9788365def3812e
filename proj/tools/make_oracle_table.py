#!/usr/bin/env python3
"""Generate tests/data/oracle_table.csv from the reference classic-control code.

CartPole and Acrobot transitions come from gymnasium's classic_control
environments. gymnasium only ships Pendulum-v1, whose velocity clip happens
before the angle update; the v0 step below is transcribed from gym 0.21 and
checked against v1 on states where neither clip is active.

usage: make_oracle_table.py [--gymnasium DIR] [--out FILE] [--seed N]
"""

import argparse
import csv
import sys

import numpy as np


def pendulum_v0_step(th, thdot, u):
    max_speed, max_torque, dt, g, m, l = 8.0, 2.0, 0.05, 10.0, 1.0, 1.0
    u = np.clip(u, -max_torque, max_torque)

    def angle_normalize(x):
        return ((x + np.pi) % (2 * np.pi)) - np.pi

    costs = angle_normalize(th) ** 2 + 0.1 * thdot**2 + 0.001 * (u**2)
    newthdot = thdot + (-3 * g / (2 * l) * np.sin(th + np.pi) + 3.0 / (m * l**2) * u) * dt
    newth = th + newthdot * dt
    newthdot = np.clip(newthdot, -max_speed, max_speed)
    return newth, newthdot, -costs


def cross_check_pendulum(pendulum_cls, rng):
    env = pendulum_cls(g=10.0)
    env.reset(seed=0)
    for _ in range(200):
        th = rng.uniform(-np.pi, np.pi)
        thdot = rng.uniform(-3.0, 3.0)
        u = rng.uniform(-2.0, 2.0)
        env.state = np.array([th, thdot])
        _, r1, _, _, _ = env.step(np.array([u]))
        th1, thdot1 = env.state
        th0, thdot0, r0 = pendulum_v0_step(th, thdot, u)
        if max(abs(th1 - th0), abs(thdot1 - thdot0), abs(r1 - r0)) > 1e-12:
            raise SystemExit(f"pendulum v0 transcription disagrees with v1 at {th},{thdot},{u}")


def fmt(x):
    return repr(float(x))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--gymnasium", help="directory containing the gymnasium package")
    ap.add_argument("--out", default="tests/data/oracle_table.csv")
    ap.add_argument("--seed", type=int, default=20240517)
    args = ap.parse_args()
    if args.gymnasium:
        sys.path.insert(0, args.gymnasium)
    from gymnasium.envs.classic_control.acrobot import AcrobotEnv
    from gymnasium.envs.classic_control.cartpole import CartPoleEnv
    from gymnasium.envs.classic_control.pendulum import PendulumEnv

    rng = np.random.default_rng(args.seed)
    rows = []

    cp = CartPoleEnv()
    cp.reset(seed=0)
    for i in range(20):
        if i < 16:
            s = rng.uniform([-2.0, -2.0, -0.18, -2.0], [2.0, 2.0, 0.18, 2.0])
        else:
            # near the failure boundary so terminations are covered
            s = np.array([rng.choice([-2.39, 2.39]), rng.choice([-1.0, 1.0]) * 2.5,
                          rng.choice([-0.2, 0.2]), rng.choice([-1.0, 1.0]) * 1.5])
        a = int(rng.integers(0, 2))
        cp.reset(seed=0)
        cp.state = np.array(s, dtype=np.float64)
        _, r, term, _, _ = cp.step(a)
        rows.append(["cartpole-v0", *map(fmt, s), str(a), *map(fmt, cp.state), fmt(r), str(int(term))])

    cross_check_pendulum(PendulumEnv, rng)
    for i in range(20):
        if i < 12:
            th, thdot, u = rng.uniform(-np.pi, np.pi), rng.uniform(-4.0, 4.0), rng.uniform(-2.0, 2.0)
        elif i < 16:
            # velocity clip active
            th, thdot, u = rng.uniform(-np.pi, np.pi), rng.choice([-1.0, 1.0]) * 7.9, rng.uniform(-2.0, 2.0)
        else:
            # torque clip active, angle outside [-pi, pi)
            th, thdot, u = rng.uniform(-9.0, 9.0), rng.uniform(-8.0, 8.0), rng.choice([-1.0, 1.0]) * 3.5
        nth, nthdot, r = pendulum_v0_step(th, thdot, u)
        rows.append(["pendulum-v0", fmt(th), fmt(thdot), "", "", fmt(u),
                     fmt(nth), fmt(nthdot), "", "", fmt(r), "0"])

    ac = AcrobotEnv()
    ac.reset(seed=0)
    for i in range(20):
        if i < 15:
            s = rng.uniform([-np.pi, -np.pi, -4 * np.pi, -9 * np.pi], [np.pi, np.pi, 4 * np.pi, 9 * np.pi])
        else:
            # swung up close to the goal height
            s = np.array([rng.uniform(2.6, 3.1), rng.uniform(-0.5, 0.5),
                          rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)])
        a = int(rng.integers(0, 3))
        ac.reset(seed=0)
        ac.state = np.array(s, dtype=np.float64)
        _, r, term, _, _ = ac.step(a)
        rows.append(["acrobot-v1", *map(fmt, s), str(a), *map(fmt, ac.state), fmt(r), str(int(term))])

    with open(args.out, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["env", "s0", "s1", "s2", "s3", "action", "n0", "n1", "n2", "n3", "reward", "done"])
        w.writerows(rows)
    dones = {env: sum(int(r[-1]) for r in rows if r[0] == env) for env in ("cartpole-v0", "acrobot-v1")}
    print(f"wrote {len(rows)} rows to {args.out}; terminal rows {dones}")


if __name__ == "__main__":
    main()
