"""Tests for the attractor flow: central charge, stepping, convergence certificates."""

import math
import random

import mpmath as mp
import numpy as np
import pytest

from attrarith.arith import QuadraticSurd
from attrarith.attractor import ChargeData, attractor_point
from attrarith.errors import (
    DegenerateCharge,
    NonConvergence,
    NotUpperHalfPlane,
    OutOfRange,
    StepUnderflow,
)
from attrarith.flow import (
    FlowConfig,
    FlowState,
    central_charge_sq,
    export_trajectory,
    flow_integrate,
    flow_step,
)


def random_charge(rng):
    p2 = rng.randint(1, 8)
    pq = rng.randint(-6, 6)
    q2 = pq * pq // p2 + rng.randint(1, 6)
    return ChargeData(p2, q2, pq)


class TestCentralCharge:
    def test_unit_charge_values(self):
        c = ChargeData(1, 1, 0)
        assert central_charge_sq(c, QuadraticSurd(0, 1, 1, -1)) == 1
        assert central_charge_sq(c, QuadraticSurd(0, 2, 1, -1)) == mp.mpf(5) / 4
        assert central_charge_sq(c, mp.mpc(0, 2)) == mp.mpf(5) / 4

    def test_closed_form_minimum(self):
        c = ChargeData(2, 3, 1)
        tau_star = QuadraticSurd(1, 1, 2, -5)
        with mp.workprec(220):
            assert abs(central_charge_sq(c, tau_star) - mp.sqrt(5)) < mp.mpf(2) ** -200

    def test_minimum_is_global(self):
        rng = random.Random(71)
        with mp.workprec(120):
            for _ in range(25):
                c = random_charge(rng)
                star = attractor_point(c).tau
                best = central_charge_sq(c, star)
                for _ in range(40):
                    z = mp.mpc(rng.uniform(-4, 4), rng.uniform(0.05, 4))
                    assert central_charge_sq(c, z) >= best - mp.mpf(2) ** -100

    def test_degenerate_and_domain_errors(self):
        with pytest.raises(DegenerateCharge):
            central_charge_sq(ChargeData(0, 1, 0), mp.mpc(0, 1))
        with pytest.raises(NotUpperHalfPlane):
            central_charge_sq(ChargeData(1, 1, 0), mp.mpc(1, -2))
        with pytest.raises(NotUpperHalfPlane):
            central_charge_sq(ChargeData(1, 1, 0), QuadraticSurd(3, 0, 1, -4))


class TestFlowStep:
    def test_fixed_point_is_stationary(self):
        c = ChargeData(2, 3, 1)
        star = complex(attractor_point(c).tau)
        s0 = FlowState(rho=0.0, U=0.0, tau=star,
                       Z2=float(central_charge_sq(c, mp.mpc(star))))
        s1 = flow_step(s0, c)
        assert abs(s1.tau - star) < 1e-9
        assert s1.U < s0.U

    def test_z_decreases_off_fixed_point(self):
        c = ChargeData(1, 1, 0)
        z2 = float(central_charge_sq(c, mp.mpc('0.3', '1.7')))
        s0 = FlowState(rho=0.0, U=0.0, tau=complex(0.3, 1.7), Z2=z2)
        s1 = flow_step(s0, c)
        assert s1.Z2 <= s0.Z2
        assert s1.rho > 0

    def test_degenerate_charge(self):
        s0 = FlowState(rho=0.0, U=0.0, tau=1j, Z2=1.0)
        with pytest.raises(DegenerateCharge):
            flow_step(s0, ChargeData(0, 1, 0))

    def test_config_validation(self):
        with pytest.raises(OutOfRange):
            FlowConfig(step=0.0)
        with pytest.raises(OutOfRange):
            FlowConfig(tol=-1e-9)
        with pytest.raises(OutOfRange):
            FlowConfig(max_steps=0)


class TestFlowIntegrate:
    def test_unit_charge_converges_to_i(self):
        res = flow_integrate(ChargeData(1, 1, 0), mp.mpc('0.3', '1.7'),
                             FlowConfig(tol=1e-11))
        assert res.converged
        assert abs(res.final_state.tau - 1j) < 1e-8
        assert abs(res.final_state.Z2 - 1.0) < 1e-8
        assert res.certificate.tau_error < 1e-8
        assert res.certificate.entropy_error < 1e-8
        assert res.certificate.monotone

    def test_charge_231_converges(self):
        res = flow_integrate(ChargeData(2, 3, 1), mp.mpc(0, '1.2'),
                             FlowConfig(tol=1e-11))
        star = complex(0.5, math.sqrt(5) / 2)
        assert abs(res.final_state.tau - star) < 1e-8
        assert abs(res.final_state.Z2 - math.sqrt(5)) < 1e-8

    def test_start_at_fixed_point(self):
        c = ChargeData(2, 3, 1)
        res = flow_integrate(c, attractor_point(c).tau)
        assert res.converged and res.steps <= 1

    def test_monotone_random(self):
        rng = random.Random(72)
        for _ in range(50):
            c = random_charge(rng)
            tau0 = mp.mpc(rng.uniform(-2, 2), rng.uniform(0.3, 2.5))
            res = flow_integrate(c, tau0, FlowConfig(tol=1e-10, max_steps=400000))
            assert res.converged
            assert res.certificate.monotone
            assert res.certificate.tau_error < 1e-6
            assert res.certificate.entropy_error < 1e-6

    def test_multistart_endpoint_independence(self):
        rng = random.Random(73)
        c = ChargeData(3, 5, 2)
        ends = []
        for _ in range(6):
            tau0 = mp.mpc(rng.uniform(-2, 2), rng.uniform(0.3, 2.5))
            ends.append(flow_integrate(c, tau0, FlowConfig(tol=1e-11)).final_state.tau)
        for e in ends[1:]:
            assert abs(e - ends[0]) < 1e-8

    def test_charge_rescaling_invariance(self):
        # (p,q) -> (2p, 2q) quadruples the invariants; tau trajectory target is unchanged
        cfg = FlowConfig(tol=1e-11)
        tau0 = mp.mpc('0.7', '0.9')
        base = flow_integrate(ChargeData(2, 3, 1), tau0, cfg)
        scaled = flow_integrate(ChargeData(8, 12, 4), tau0, cfg)
        assert abs(base.final_state.tau - scaled.final_state.tau) < 1e-8
        assert abs(scaled.final_state.Z2 - 4 * base.final_state.Z2) < 1e-6

    def test_nonconvergence_carries_trajectory(self):
        with pytest.raises(NonConvergence) as exc:
            flow_integrate(ChargeData(1, 1, 0), mp.mpc('0.3', '1.7'),
                           FlowConfig(max_steps=5))
        assert exc.value.trajectory.shape == (6, 5)

    def test_step_underflow_on_broken_start(self):
        with pytest.raises(StepUnderflow):
            flow_integrate(ChargeData(1, 1, 0), mp.mpc(0, 1e-308))

    def test_invalid_inputs(self):
        with pytest.raises(NotUpperHalfPlane):
            flow_integrate(ChargeData(1, 1, 0), mp.mpc(0, -1))
        with pytest.raises(DegenerateCharge):
            flow_integrate(ChargeData(0, 1, 0), mp.mpc(0, 1))

    def test_csv_export(self, tmp_path):
        res = flow_integrate(ChargeData(1, 1, 0), mp.mpc('0.1', '1.4'),
                             FlowConfig(tol=1e-6))
        out = tmp_path / "traj.csv"
        export_trajectory(res, out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "rho,U,re_tau,im_tau,Z2"
        assert len(lines) == res.steps + 2
        first = [float(v) for v in lines[1].split(",")]
        assert first[:2] == [0.0, 0.0]
        assert first[2:4] == [0.1, 1.4]
        # 17 significant digits survive a round trip
        last = [float(v) for v in lines[-1].split(",")]
        assert last[2] == res.final_state.tau.real
        assert last[4] == res.final_state.Z2
