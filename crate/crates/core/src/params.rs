//! Initial-state angles.
//!
//! Each qubit `k` starts in `cos(θ_k/2)|0⟩ + e^{iφ_k} sin(θ_k/2)|1⟩`, whose
//! Bloch vector is `(sinθ cosφ, sinθ sinφ, cosθ)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BipartiteGraph, VertexId};

const ANGLE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("theta has {theta} entries but phi has {phi}")]
    LengthMismatch { theta: usize, phi: usize },
    #[error("theta[{qubit}] = {value} lies outside [0, pi]")]
    ThetaOutOfRange { qubit: usize, value: f64 },
    #[error("phi[{qubit}] = {value} lies outside [0, 2pi)")]
    PhiOutOfRange { qubit: usize, value: f64 },
    #[error("cannot parse angle {0:?}")]
    BadAngle(String),
    #[error("line {line}: expected \"<theta> <phi>\", found {text:?}")]
    BadParamsLine { line: usize, text: String },
}

/// Parses an angle in radians. Accepts plain decimals and `pi` fractions such as
/// `pi`, `-pi/2`, `3pi/4`, `3*pi/16` or `0.25pi`.
pub fn parse_angle(text: &str) -> Result<f64, ParamsError> {
    let bad = || ParamsError::BadAngle(text.to_string());
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.to_ascii_lowercase();
    if s.is_empty() {
        return Err(bad());
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s.as_str(), None),
    };
    let numerator = match num.find("pi") {
        Some(pos) => {
            if !num[pos + 2..].is_empty() {
                return Err(bad());
            }
            let coef = num[..pos].trim_end_matches('*');
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(d) => {
            let d: f64 = d.parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            numerator / d
        }
        None => numerator,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// Renders an angle as a `pi` fraction when it is one with a small
/// power-of-two denominator, otherwise as a decimal.
pub fn format_angle(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    for den in [1u32, 2, 4, 8, 16, 32, 64] {
        let k = value / PI * f64::from(den);
        if (k - k.round()).abs() < 1e-9 {
            let k = k.round() as i64;
            let num = match k {
                1 => "pi".to_string(),
                -1 => "-pi".to_string(),
                k => format!("{k}pi"),
            };
            return if den == 1 {
                num
            } else {
                format!("{num}/{den}")
            };
        }
    }
    format!("{value}")
}

/// Uniform angles for each side of the graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideAngles {
    pub theta_u: f64,
    pub phi_u: f64,
    pub theta_v: f64,
    pub phi_v: f64,
}

impl SideAngles {
    pub fn all(angle: f64) -> Self {
        SideAngles {
            theta_u: angle,
            phi_u: angle,
            theta_v: angle,
            phi_v: angle,
        }
    }

    pub fn get(&self, axis: AngleAxis) -> f64 {
        match axis {
            AngleAxis::ThetaU => self.theta_u,
            AngleAxis::PhiU => self.phi_u,
            AngleAxis::ThetaV => self.theta_v,
            AngleAxis::PhiV => self.phi_v,
        }
    }

    pub fn set(&mut self, axis: AngleAxis, value: f64) {
        match axis {
            AngleAxis::ThetaU => self.theta_u = value,
            AngleAxis::PhiU => self.phi_u = value,
            AngleAxis::ThetaV => self.theta_v = value,
            AngleAxis::PhiV => self.phi_v = value,
        }
    }

    /// Per-qubit form for a graph with the given partition sizes.
    pub fn to_params(&self, u_count: usize, v_count: usize) -> Result<QubitParams, ParamsError> {
        let theta = std::iter::repeat_n(self.theta_u, u_count)
            .chain(std::iter::repeat_n(self.theta_v, v_count))
            .collect();
        let phi = std::iter::repeat_n(self.phi_u, u_count)
            .chain(std::iter::repeat_n(self.phi_v, v_count))
            .collect();
        QubitParams::new(theta, phi)
    }

    pub fn for_graph(&self, g: &BipartiteGraph) -> Result<QubitParams, ParamsError> {
        self.to_params(g.u_count(), g.v_count())
    }
}

/// One of the four uniform angles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AngleAxis {
    #[serde(rename = "theta_U")]
    ThetaU,
    #[serde(rename = "phi_U")]
    PhiU,
    #[serde(rename = "theta_V")]
    ThetaV,
    #[serde(rename = "phi_V")]
    PhiV,
}

impl AngleAxis {
    pub const ALL: [AngleAxis; 4] = [
        AngleAxis::ThetaU,
        AngleAxis::PhiU,
        AngleAxis::ThetaV,
        AngleAxis::PhiV,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AngleAxis::ThetaU => "theta_U",
            AngleAxis::PhiU => "phi_U",
            AngleAxis::ThetaV => "theta_V",
            AngleAxis::PhiV => "phi_V",
        }
    }
}

impl fmt::Display for AngleAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AngleAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AngleAxis::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown angle axis {s:?} (expected theta_U, phi_U, theta_V or phi_V)")
            })
    }
}

/// Per-qubit angles `θ_k ∈ [0, π]`, `φ_k ∈ [0, 2π)`, indexed by global qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QubitParams {
    theta: Vec<f64>,
    phi: Vec<f64>,
}

impl QubitParams {
    pub fn new(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self, ParamsError> {
        if theta.len() != phi.len() {
            return Err(ParamsError::LengthMismatch {
                theta: theta.len(),
                phi: phi.len(),
            });
        }
        for (qubit, &value) in theta.iter().enumerate() {
            if !(value.is_finite() && (-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&value)) {
                return Err(ParamsError::ThetaOutOfRange { qubit, value });
            }
        }
        for (qubit, &value) in phi.iter().enumerate() {
            if !(value.is_finite() && (-ANGLE_SLACK..2.0 * PI).contains(&value)) {
                return Err(ParamsError::PhiOutOfRange { qubit, value });
            }
        }
        Ok(QubitParams { theta, phi })
    }

    /// Parses one `<theta> <phi>` pair per line, qubit 0 first.
    pub fn parse(text: &str) -> Result<Self, ParamsError> {
        let mut theta = Vec::new();
        let mut phi = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parts: Vec<&str> = content.split_whitespace().collect();
            let [t, p] = parts[..] else {
                return Err(ParamsError::BadParamsLine {
                    line: i + 1,
                    text: content.to_string(),
                });
            };
            theta.push(parse_angle(t)?);
            phi.push(parse_angle(p)?);
        }
        Self::new(theta, phi)
    }

    pub fn to_text(&self) -> String {
        self.theta
            .iter()
            .zip(&self.phi)
            .map(|(&t, &p)| format!("{} {}\n", format_angle(t), format_angle(p)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn theta(&self, q: VertexId) -> f64 {
        self.theta[q.0]
    }

    pub fn phi(&self, q: VertexId) -> f64 {
        self.phi[q.0]
    }

    pub fn thetas(&self) -> &[f64] {
        &self.theta
    }

    pub fn phis(&self) -> &[f64] {
        &self.phi
    }

    /// θ of the `k`-th vertex of `U`.
    pub fn theta_u(&self, k: usize) -> f64 {
        self.theta[k]
    }

    pub fn phi_u(&self, k: usize) -> f64 {
        self.phi[k]
    }

    /// θ of the `k`-th vertex of `V`, which sits at qubit `u_count + k`.
    pub fn theta_v(&self, u_count: usize, k: usize) -> f64 {
        self.theta[u_count + k]
    }

    pub fn phi_v(&self, u_count: usize, k: usize) -> f64 {
        self.phi[u_count + k]
    }

    /// `⟨σ^x⟩` of qubit `q` in the initial product state.
    pub fn bloch_x(&self, q: VertexId) -> f64 {
        self.phi(q).cos() * self.theta(q).sin()
    }

    pub fn bloch_y(&self, q: VertexId) -> f64 {
        self.phi(q).sin() * self.theta(q).sin()
    }

    pub fn bloch_z(&self, q: VertexId) -> f64 {
        self.theta(q).cos()
    }

    /// Returns the shared per-side angles if every qubit on each side agrees.
    pub fn uniform(&self, u_count: usize) -> Option<SideAngles> {
        let same = |xs: &[f64]| xs.windows(2).all(|w| w[0] == w[1]);
        let (tu, tv) = self.theta.split_at(u_count);
        let (pu, pv) = self.phi.split_at(u_count);
        if tu.is_empty() || tv.is_empty() || !(same(tu) && same(tv) && same(pu) && same(pv)) {
            return None;
        }
        Some(SideAngles {
            theta_u: tu[0],
            phi_u: pu[0],
            theta_v: tv[0],
            phi_v: pv[0],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_literals() {
        let cases = [
            ("0", 0.0),
            ("0.5", 0.5),
            ("pi", PI),
            ("-pi/2", -PI / 2.0),
            ("pi/16", PI / 16.0),
            ("3pi/4", 3.0 * PI / 4.0),
            ("3*pi/16", 3.0 * PI / 16.0),
            ("0.25pi", PI / 4.0),
            (" PI / 4 ", PI / 4.0),
            ("1/2", 0.5),
        ];
        for (text, want) in cases {
            assert!((parse_angle(text).unwrap() - want).abs() < 1e-15, "{text}");
        }
        for bad in ["", "pi2", "x", "pi/0", "pi/", "2pipi"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn angle_formatting_round_trips() {
        for k in 0..=32 {
            let a = PI * f64::from(k) / 16.0;
            let text = format_angle(a);
            assert!((parse_angle(&text).unwrap() - a).abs() < 1e-14, "{text}");
        }
        assert_eq!(format_angle(PI / 4.0), "pi/4");
        assert_eq!(format_angle(3.0 * PI / 16.0), "3pi/16");
        assert_eq!(format_angle(PI), "pi");
        assert_eq!(format_angle(0.3), "0.3");
    }

    #[test]
    fn validation() {
        assert!(QubitParams::new(vec![0.0], vec![0.0, 1.0]).is_err());
        assert!(matches!(
            QubitParams::new(vec![4.0], vec![0.0]),
            Err(ParamsError::ThetaOutOfRange { qubit: 0, .. })
        ));
        assert!(matches!(
            QubitParams::new(vec![1.0], vec![2.0 * PI]),
            Err(ParamsError::PhiOutOfRange { .. })
        ));
        assert!(QubitParams::new(vec![PI], vec![0.0]).is_ok());
    }

    #[test]
    fn side_accessors_and_uniform() {
        let p = SideAngles {
            theta_u: 0.1,
            phi_u: 0.2,
            theta_v: 0.3,
            phi_v: 0.4,
        }
        .to_params(2, 3)
        .unwrap();
        assert_eq!(p.len(), 5);
        assert_eq!(p.theta_u(1), 0.1);
        assert_eq!(p.phi_v(2, 2), 0.4);
        assert_eq!(p.theta(VertexId(2)), 0.3);
        assert_eq!(p.uniform(2).unwrap().phi_v, 0.4);
        let q = QubitParams::new(vec![0.1, 0.2, 0.3], vec![0.0; 3]).unwrap();
        assert!(q.uniform(2).is_none());
    }

    #[test]
    fn params_file() {
        let p = QubitParams::parse("# hub\npi/2 0\n\npi/4 pi/4 # leaf\n").unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(QubitParams::parse(&p.to_text()).unwrap(), p);
        assert!(matches!(
            QubitParams::parse("pi/2\n"),
            Err(ParamsError::BadParamsLine { line: 1, .. })
        ));
    }
}
