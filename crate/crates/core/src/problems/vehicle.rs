//! Heave, pitch and roll of a vehicle body driven over a wavy roadway.
//!
//! Internal units are ft, lb, s (slug). Wheels are numbered 1 driver front,
//! 2 passenger front, 3 passenger rear, 4 driver rear.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};

use crate::error::{IntegrateError, IntegrateResult};
use crate::problem::DynamicProblem;
use crate::vector::StateVector;

pub const MPH_TO_FT_PER_S: f64 = 5280.0 / 3600.0;
pub const STANDARD_GRAVITY: f64 = 32.174;

/// A train of raised-cosine waves laid across the road.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Roadway {
    /// Crest height (ft).
    pub amplitude: f64,
    /// Wavelength (ft).
    pub wavelength: f64,
    pub waves: u32,
    /// Passenger-side lag as a fraction of the wheelbase.
    pub side_lag: f64,
    /// Vehicle speed (ft/s).
    pub speed: f64,
    /// Distance from the driver front tire to the first wave at `t = 0` (ft).
    pub lead_in: f64,
}

impl Roadway {
    pub fn smooth() -> Self {
        Roadway {
            amplitude: 0.0,
            wavelength: 1.0,
            waves: 0,
            side_lag: 0.0,
            speed: 0.0,
            lead_in: 0.0,
        }
    }

    /// Road height and slope `dR/dξ` at road coordinate `xi`.
    pub fn profile(&self, xi: f64) -> (f64, f64) {
        let end = self.waves as f64 * self.wavelength;
        if !(0.0..=end).contains(&xi) || self.waves == 0 {
            return (0.0, 0.0);
        }
        let k = 2.0 * PI / self.wavelength;
        let half = 0.5 * self.amplitude;
        (half * (1.0 - (k * xi).cos()), half * k * (k * xi).sin())
    }

    /// Length of road, measured from the driver front tire at `t = 0`, that
    /// every tire must cover to clear the wave train.
    pub fn clearance_distance(&self, wheelbase: f64) -> f64 {
        self.lead_in + self.waves as f64 * self.wavelength + (1.0 + self.side_lag) * wheelbase
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    /// Mass of car and driver (slugs).
    pub m: f64,
    pub j_theta: f64,
    pub j_phi: f64,
    /// Damper rates, lb/(ft/s).
    pub c: [f64; 4],
    /// Spring rates, lb/ft.
    pub k: [f64; 4],
    pub l_f: f64,
    pub l_r: f64,
    pub rho_f: f64,
    pub rho_r: f64,
    pub g: f64,
    pub roadway: Roadway,
}

/// Excitation at the four tire patches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excitation {
    pub r: [f64; 4],
    pub r_dot: [f64; 4],
}

impl VehicleParams {
    /// Builds parameters from damper rates in lb/(in/s) and spring rates in
    /// lb/in.
    #[allow(clippy::too_many_arguments)]
    pub fn from_inch_rates(
        m: f64,
        j_theta: f64,
        j_phi: f64,
        c_per_inch: [f64; 4],
        k_per_inch: [f64; 4],
        l_f: f64,
        l_r: f64,
        rho_f: f64,
        rho_r: f64,
        g: f64,
        roadway: Roadway,
    ) -> IntegrateResult<Self> {
        let p = VehicleParams {
            m,
            j_theta,
            j_phi,
            c: c_per_inch.map(|c| 12.0 * c),
            k: k_per_inch.map(|k| 12.0 * k),
            l_f,
            l_r,
            rho_f,
            rho_r,
            g,
            roadway,
        };
        p.validate()?;
        Ok(p)
    }

    /// The Formula SAE car: 14 slugs, 10 and 15 lb/(in/s) dampers, 150 and
    /// 300 lb/in springs, five one-wheelbase waves of 1 in crest at 10 mph.
    pub fn fsae() -> Self {
        let wheelbase = 3.2 + 1.8;
        let roadway = Roadway {
            amplitude: 1.0 / 12.0,
            wavelength: wheelbase,
            waves: 5,
            side_lag: 0.1,
            speed: 10.0 * MPH_TO_FT_PER_S,
            lead_in: 0.0,
        };
        Self::from_inch_rates(
            14.0,
            45.0,
            20.0,
            [10.0, 10.0, 15.0, 15.0],
            [150.0, 150.0, 300.0, 300.0],
            3.2,
            1.8,
            2.1,
            2.0,
            STANDARD_GRAVITY,
            roadway,
        )
        .expect("built-in vitals are valid")
    }

    pub fn validate(&self) -> IntegrateResult<()> {
        let positive = [
            ("m", self.m),
            ("J_theta", self.j_theta),
            ("J_phi", self.j_phi),
            ("l_f", self.l_f),
            ("l_r", self.l_r),
            ("rho_f", self.rho_f),
            ("rho_r", self.rho_r),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(IntegrateError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.g.is_finite() || self.g < 0.0 {
            return Err(IntegrateError::Config(format!("gravity must be nonnegative, got {}", self.g)));
        }
        if self.c.iter().chain(&self.k).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(IntegrateError::Config(
                "damper and spring rates must be nonnegative".into(),
            ));
        }
        let r = &self.roadway;
        if !(r.amplitude.is_finite()
            && r.wavelength.is_finite()
            && r.wavelength > 0.0
            && r.side_lag.is_finite()
            && r.side_lag >= 0.0
            && r.speed.is_finite()
            && r.speed >= 0.0
            && r.lead_in.is_finite())
        {
            return Err(IntegrateError::Config("invalid roadway description".into()));
        }
        Ok(())
    }

    pub fn weight(&self) -> f64 {
        self.m * self.g
    }

    pub fn wheelbase(&self) -> f64 {
        self.l_f + self.l_r
    }

    /// Time for the last tire to leave the wave train.
    pub fn bumps_cleared_at(&self) -> f64 {
        if self.roadway.speed == 0.0 {
            return f64::INFINITY;
        }
        self.roadway.clearance_distance(self.wheelbase()) / self.roadway.speed
    }

    pub fn mass_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::new(self.m, self.j_theta, self.j_phi))
    }

    pub fn damping_matrix(&self) -> Matrix3<f64> {
        self.suspension_matrix(&self.c)
    }

    pub fn stiffness_matrix(&self) -> Matrix3<f64> {
        self.suspension_matrix(&self.k)
    }

    fn suspension_matrix(&self, r: &[f64; 4]) -> Matrix3<f64> {
        let (lf, lr, pf, pr) = (self.l_f, self.l_r, self.rho_f, self.rho_r);
        let front = r[0] + r[1];
        let rear = r[2] + r[3];
        let front_diff = r[0] - r[1];
        let rear_diff = r[2] - r[3];
        let zt = -front * lf + rear * lr;
        let zp = -front_diff * pf + rear_diff * pr;
        let tp = front_diff * lf * pf + rear_diff * lr * pr;
        Matrix3::new(
            front + rear, zt, zp,
            zt, front * lf * lf + rear * lr * lr, tp,
            zp, tp, front * pf * pf + rear * pr * pr,
        )
    }

    /// Road height and vertical rate under each tire at time `t`.
    pub fn excitation(&self, t: f64) -> Excitation {
        let road = &self.roadway;
        let wb = self.wheelbase();
        let lag = road.side_lag * wb;
        let offsets = [0.0, lag, wb + lag, wb];
        let mut ex = Excitation {
            r: [0.0; 4],
            r_dot: [0.0; 4],
        };
        for (i, off) in offsets.iter().enumerate() {
            let (r, slope) = road.profile(road.speed * t - road.lead_in - off);
            ex.r[i] = r;
            ex.r_dot[i] = slope * road.speed;
        }
        ex
    }

    pub fn forcing_from(&self, ex: &Excitation) -> Vector3<f64> {
        let (c, k) = (&self.c, &self.k);
        let e: [f64; 4] = std::array::from_fn(|i| c[i] * ex.r_dot[i] + k[i] * ex.r[i]);
        Vector3::new(
            self.weight() - e.iter().sum::<f64>(),
            (e[0] + e[1]) * self.l_f - (e[2] + e[3]) * self.l_r,
            (e[0] - e[1]) * self.rho_f - (e[2] - e[3]) * self.rho_r,
        )
    }

    pub fn forcing(&self, t: f64) -> Vector3<f64> {
        self.forcing_from(&self.excitation(t))
    }

    /// `M⁻¹ (f(t) − C v − K x)`.
    pub fn acceleration(&self, t: f64, x: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
        let rhs = self.forcing(t) - self.damping_matrix() * v - self.stiffness_matrix() * x;
        Vector3::new(rhs[0] / self.m, rhs[1] / self.j_theta, rhs[2] / self.j_phi)
    }

    /// Static equilibrium on a smooth road: `K x₀ = (w, 0, 0)`, `v₀ = 0`.
    pub fn static_ic(&self) -> IntegrateResult<(Vector3<f64>, Vector3<f64>)> {
        let k = self.stiffness_matrix();
        let x0 = k
            .lu()
            .solve(&Vector3::new(self.weight(), 0.0, 0.0))
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or_else(|| IntegrateError::Domain("stiffness matrix is singular".into()))?;
        Ok((x0, Vector3::zeros()))
    }

    pub fn problem(&self, t_end: f64, n_global: usize) -> IntegrateResult<DynamicProblem> {
        self.validate()?;
        let (x0, v0) = self.static_ic()?;
        let p = *self;
        // the matrices are fixed for the run
        let c = self.damping_matrix();
        let k = self.stiffness_matrix();
        let inv_m = Vector3::new(1.0 / p.m, 1.0 / p.j_theta, 1.0 / p.j_phi);
        Ok(DynamicProblem::new(
            move |t, x, v| {
                let x = Vector3::from_column_slice(x.as_slice());
                let v = Vector3::from_column_slice(v.as_slice());
                let rhs = p.forcing(t) - c * v - k * x;
                StateVector::new(rhs.component_mul(&inv_m).as_slice().to_vec())
            },
            x0.as_slice().to_vec(),
            v0.as_slice().to_vec(),
            t_end,
            n_global,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn smooth_fsae() -> VehicleParams {
        VehicleParams {
            roadway: Roadway::smooth(),
            ..VehicleParams::fsae()
        }
    }

    #[test]
    fn unit_conversion() {
        let p = VehicleParams::fsae();
        assert_eq!(p.k, [1800.0, 1800.0, 3600.0, 3600.0]);
        assert_eq!(p.c, [120.0, 120.0, 180.0, 180.0]);
        assert!((p.weight() - 450.0).abs() < 0.5);
        assert!((p.roadway.speed - 14.666_666_666_666_666).abs() < 1e-12);
    }

    #[test]
    fn stiffness_entries() {
        let k = VehicleParams::fsae().stiffness_matrix();
        assert_eq!(k[(0, 0)], 10800.0);
        assert!((k[(0, 1)] - 1440.0).abs() < 1e-9);
        assert!((k[(1, 1)] - 60192.0).abs() < 1e-9);
        assert!((k[(2, 2)] - 44676.0).abs() < 1e-9);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k[(1, 2)], 0.0);
    }

    #[test]
    fn zero_dampers_give_zero_matrix() {
        let p = VehicleParams {
            c: [0.0; 4],
            ..VehicleParams::fsae()
        };
        assert_eq!(p.damping_matrix(), Matrix3::zeros());
    }

    #[test]
    fn static_ic_matches_hand_solve() {
        let p = VehicleParams {
            g: 450.0 / 14.0,
            ..VehicleParams::fsae()
        };
        let (x0, v0) = p.static_ic().unwrap();
        // Cramer's rule on the decoupled heave/pitch block
        let det = 10800.0 * 60192.0 - 1440.0 * 1440.0;
        assert!((x0[0] - 450.0 * 60192.0 / det).abs() < 1e-14);
        assert!((x0[1] + 450.0 * 1440.0 / det).abs() < 1e-16);
        assert!((x0[0] - 0.041_80).abs() < 1e-5);
        assert!((x0[1] + 1.0e-3).abs() < 1e-9);
        assert_eq!(x0[2], 0.0);
        assert_eq!(v0, Vector3::zeros());
    }

    #[test]
    fn symmetric_springs_and_lengths_give_pure_heave() {
        let p = VehicleParams {
            k: [1000.0; 4],
            l_f: 2.5,
            l_r: 2.5,
            ..VehicleParams::fsae()
        };
        let (x0, _) = p.static_ic().unwrap();
        assert!((x0[0] - p.weight() / 4000.0).abs() < 1e-15);
        assert!(x0[1].abs() < 1e-18);
        assert_eq!(x0[2], 0.0);
    }

    #[test]
    fn singular_stiffness_is_domain_error() {
        let p = VehicleParams {
            k: [0.0; 4],
            ..VehicleParams::fsae()
        };
        assert!(matches!(p.static_ic(), Err(IntegrateError::Domain(_))));
    }

    #[test]
    fn smooth_road_forcing_is_weight() {
        let p = smooth_fsae();
        assert_eq!(p.forcing(1.3), Vector3::new(p.weight(), 0.0, 0.0));
        let a = p.acceleration(0.0, &Vector3::zeros(), &Vector3::zeros());
        assert!((a - Vector3::new(p.g, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn free_body_acceleration() {
        let p = VehicleParams {
            c: [0.0; 4],
            k: [0.0; 4],
            ..VehicleParams::fsae()
        };
        let t = 0.4;
        let f = p.forcing(t);
        let a = p.acceleration(t, &Vector3::new(1.0, 2.0, 3.0), &Vector3::new(4.0, 5.0, 6.0));
        assert_eq!(a, Vector3::new(f[0] / p.m, f[1] / p.j_theta, f[2] / p.j_phi));
    }

    #[test]
    fn equilibrium_has_zero_acceleration() {
        let p = smooth_fsae();
        let (x0, v0) = p.static_ic().unwrap();
        let a = p.acceleration(0.0, &x0, &v0);
        assert!(a.norm() <= 1e-10 * p.g);
    }

    #[test]
    fn symmetric_excitation_has_no_roll() {
        let p = VehicleParams::fsae();
        let ex = Excitation {
            r: [0.01, 0.01, 0.02, 0.02],
            r_dot: [0.3, 0.3, -0.1, -0.1],
        };
        assert_eq!(p.forcing_from(&ex)[2], 0.0);
    }

    #[test]
    fn roadway_examples() {
        let p = VehicleParams {
            roadway: Roadway {
                lead_in: 2.0,
                ..VehicleParams::fsae().roadway
            },
            ..VehicleParams::fsae()
        };
        let ex = p.excitation(0.0);
        assert_eq!(ex.r, [0.0; 4]);
        assert_eq!(ex.r_dot, [0.0; 4]);

        let road = p.roadway;
        let t_crest = (road.lead_in + road.wavelength / 2.0) / road.speed;
        let ex = p.excitation(t_crest);
        assert!((ex.r[0] - road.amplitude).abs() < 1e-15);
        assert!(ex.r_dot[0].abs() < 1e-12);

        let ex = p.excitation(p.bumps_cleared_at() + 1e-9);
        assert_eq!(ex.r, [0.0; 4]);
        assert_eq!(ex.r_dot, [0.0; 4]);
    }

    #[test]
    fn roadway_rate_is_time_derivative() {
        let p = VehicleParams::fsae();
        let h = 1e-6;
        for i in 1..40 {
            let t = i as f64 * 0.05;
            let ex = p.excitation(t);
            let (lo, hi) = (p.excitation(t - h), p.excitation(t + h));
            for w in 0..4 {
                let fd = (hi.r[w] - lo.r[w]) / (2.0 * h);
                assert!((fd - ex.r_dot[w]).abs() < 1e-6, "t={t} wheel={w}");
            }
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = VehicleParams {
            m: 0.0,
            ..VehicleParams::fsae()
        };
        assert!(bad.validate().is_err());
        let bad = VehicleParams {
            k: [-1.0, 0.0, 0.0, 0.0],
            ..VehicleParams::fsae()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn suspension_matrices_symmetric(
            c in proptest::array::uniform4(0.0f64..500.0),
            k in proptest::array::uniform4(0.0f64..5000.0),
            lf in 0.5f64..4.0, lr in 0.5f64..4.0, pf in 0.5f64..3.0, pr in 0.5f64..3.0,
        ) {
            let p = VehicleParams { c, k, l_f: lf, l_r: lr, rho_f: pf, rho_r: pr, ..VehicleParams::fsae() };
            let cm = p.damping_matrix();
            let km = p.stiffness_matrix();
            prop_assert_eq!(cm, cm.transpose());
            prop_assert_eq!(km, km.transpose());
        }

        #[test]
        fn roadway_continuous(xi in -1.0f64..30.0) {
            let road = VehicleParams::fsae().roadway;
            let d = 1e-9;
            let (a, sa) = road.profile(xi);
            let (b, sb) = road.profile(xi + d);
            prop_assert!((a - b).abs() < 1e-8);
            prop_assert!((sa - sb).abs() < 1e-7);
        }

        #[test]
        fn decoupled_roll_has_zero_static_offset(
            kf in 100.0f64..5000.0, kr in 100.0f64..5000.0,
            lf in 0.5f64..4.0, lr in 0.5f64..4.0,
        ) {
            let p = VehicleParams { k: [kf, kf, kr, kr], l_f: lf, l_r: lr, ..VehicleParams::fsae() };
            let (x0, _) = p.static_ic().unwrap();
            prop_assert_eq!(x0[2], 0.0);
        }
    }
}
