//! The rigid-motion family of a rolling and its diagnostics.

use serde::Serialize;
use serde_json::{Map, Value};

use super::{classify_instantaneous_with, rolling_exists, AntiDevelopment, MotionClass};
use crate::curves::{DarbouxTriple, SurfaceCurve};
use crate::numeric::{asymmetry, orthogonality_error, sampled_derivative, skew, vee};
use crate::output::{csv_line, fmt17, to_json17};
use crate::{Error, Mat3, Result, Vec3};

/// Largest tolerated `‖Q + Qᵀ‖` of the rotation rate.
const SKEW_TOL: f64 = 1e-8;

/// Sampled motion `f_t(x) = A_t x + b_t` of the rolling surface.
#[derive(Debug, Clone)]
pub struct RigidMotionFamily {
    pub times: Vec<f64>,
    pub rotations: Vec<Mat3>,
    pub translations: Vec<Vec3>,
    /// Angular velocity from `Q_t = D_t (Λ̃_t - Λ_t) D_tᵀ`.
    pub omegas: Vec<Vec3>,
    /// Contact points `γ(t)`.
    pub contacts: Vec<Vec3>,
    /// Normal of the contact surface along `γ`.
    pub normals: Vec<Vec3>,
    /// Darboux frames `D_t` of `γ`.
    pub frames: Vec<Mat3>,
    /// Darboux curvatures of `γ`.
    pub triples: Vec<DarbouxTriple>,
    pub anti_development: AntiDevelopment,
}

/// Largest violations of the defining properties over all samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotionResiduals {
    /// `max |A_tᵀ A_t - I|`.
    pub orthogonality: f64,
    /// `max |det A_t - 1|`.
    pub determinant: f64,
    /// `max |⟨ω_t, N(t)⟩|`.
    pub no_spin: f64,
    /// `max |A'_t γ̃(t) + b'_t|`, the velocity of the contact point under
    /// the motion, with derivatives from the samples.
    pub no_skid: f64,
    /// `max |A_t Ñ(γ̃(t)) - N(t)|`.
    pub tangency: f64,
    /// `max |vee(A'_t A_tᵀ) - ω_t|` with `A'` from the samples.
    pub omega_agreement: f64,
    /// `|A_0 - I| + |b_0|`.
    pub initial: f64,
}

/// Trajectory of the center of a rolling ball, computed two ways.
#[derive(Debug, Clone)]
pub struct CenterTrajectory {
    pub times: Vec<f64>,
    /// `f_t(p + r N_p)`.
    pub from_motion: Vec<Vec3>,
    /// `γ(t) + r N(t)`.
    pub from_normal: Vec<Vec3>,
    pub max_discrepancy: f64,
}

impl CenterTrajectory {
    /// `|c'(0)|` by the one-sided fourth-order stencil on the first five
    /// samples.
    pub fn initial_speed(&self) -> f64 {
        let h = self.times[1] - self.times[0];
        sampled_derivative(&self.from_motion, h, 0).norm()
    }
}

/// Builds `f_t` from the contact curve and the anti-development, sampled
/// at the anti-development's times.
pub fn build_motion(gamma: &SurfaceCurve, ad: &AntiDevelopment) -> Result<RigidMotionFamily> {
    let jets = ad.times.iter().map(|&t| gamma.jet(t)).collect::<Result<Vec<_>>>()?;
    let triples: Vec<DarbouxTriple> = jets.iter().map(|j| j.darboux()).collect();
    let check = rolling_exists(&triples, &ad.triples);
    if let Some(t) = check.first_violation {
        return Err(Error::NotRolling { t });
    }
    let n = ad.len();
    let mut family = RigidMotionFamily {
        times: ad.times.clone(),
        rotations: Vec::with_capacity(n),
        translations: Vec::with_capacity(n),
        omegas: Vec::with_capacity(n),
        contacts: Vec::with_capacity(n),
        normals: Vec::with_capacity(n),
        frames: Vec::with_capacity(n),
        triples,
        anti_development: ad.clone(),
    };
    for (i, j) in jets.iter().enumerate() {
        let d = j.frame();
        let a = d * ad.frames[i].transpose();
        let b = j.point - a * ad.positions[i];
        let q = d * (ad.triples[i].lambda() - family.triples[i].lambda()) * d.transpose();
        let asym = asymmetry(&q);
        if asym > SKEW_TOL {
            return Err(Error::NotSkew { asymmetry: asym });
        }
        family.rotations.push(a);
        family.translations.push(b);
        family.omegas.push(vee(&q));
        family.contacts.push(j.point);
        family.normals.push(j.normal);
        family.frames.push(d);
    }
    Ok(family)
}

impl RigidMotionFamily {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    /// `f_t(x)` at sample `i`.
    pub fn apply(&self, i: usize, x: &Vec3) -> Vec3 {
        self.rotations[i] * x + self.translations[i]
    }

    fn rotation_rate(&self, i: usize) -> Mat3 {
        sampled_derivative(&self.rotations, self.spacing(), i)
    }

    fn translation_rate(&self, i: usize) -> Vec3 {
        sampled_derivative(&self.translations, self.spacing(), i)
    }

    /// Instantaneous motion `x -> Q x + v` at sample `i`, with `Q` from the
    /// Darboux data and `v = b' - Q b` from the sampled translations.
    pub fn instantaneous(&self, i: usize) -> (Mat3, Vec3) {
        let q = skew(&self.omegas[i]);
        (q, self.translation_rate(i) - q * self.translations[i])
    }

    /// Classification of the instantaneous motion at sample `i`; the
    /// threshold allows for the differentiation error of `b'`.
    pub fn classify_at(&self, i: usize) -> Result<MotionClass> {
        let (q, v) = self.instantaneous(i);
        classify_instantaneous_with(&q, &v, &self.contacts[i], 1e-6)
    }

    pub fn residuals(&self) -> MotionResiduals {
        let ad = &self.anti_development;
        let mut r = MotionResiduals {
            orthogonality: 0.0,
            determinant: 0.0,
            no_spin: 0.0,
            no_skid: 0.0,
            tangency: 0.0,
            omega_agreement: 0.0,
            initial: (self.rotations[0] - Mat3::identity()).abs().max() + self.translations[0].norm(),
        };
        for i in 0..self.len() {
            let a = &self.rotations[i];
            let a_rate = self.rotation_rate(i);
            let contact_velocity = a_rate * ad.positions[i] + self.translation_rate(i);
            let q = a_rate * a.transpose();
            let omega_fd = vee(&(0.5 * (q - q.transpose())));
            r.orthogonality = r.orthogonality.max(orthogonality_error(a));
            r.determinant = r.determinant.max((a.determinant() - 1.0).abs());
            r.no_spin = r.no_spin.max(self.omegas[i].dot(&self.normals[i]).abs());
            r.no_skid = r.no_skid.max(contact_velocity.norm());
            r.tangency = r.tangency.max((a * ad.surface_normals[i] - self.normals[i]).norm());
            r.omega_agreement = r.omega_agreement.max((omega_fd - self.omegas[i]).norm());
        }
        r
    }

    /// Center of the ball `B_r` placed at `p + r N_p`, followed by the
    /// motion and, independently, as `γ(t) + r N(t)`.
    pub fn center_trajectory(&self, r: f64) -> CenterTrajectory {
        let c0 = self.contacts[0] + self.normals[0] * r;
        let from_motion: Vec<Vec3> = (0..self.len()).map(|i| self.apply(i, &c0)).collect();
        let from_normal: Vec<Vec3> = self.contacts.iter().zip(&self.normals).map(|(p, n)| p + n * r).collect();
        let max_discrepancy =
            from_motion.iter().zip(&from_normal).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        CenterTrajectory { times: self.times.clone(), from_motion, from_normal, max_discrepancy }
    }

    fn row(&self, i: usize) -> Vec<(String, f64)> {
        let a = &self.rotations[i];
        let mut row = vec![("t".to_owned(), self.times[i])];
        for r in 0..3 {
            for c in 0..3 {
                row.push((format!("a{}{}", r + 1, c + 1), a[(r, c)]));
            }
        }
        let named = [("b", &self.translations[i]), ("omega_", &self.omegas[i]), ("contact_", &self.contacts[i])];
        for (prefix, v) in named {
            for (axis, x) in ["x", "y", "z"].iter().zip(v.iter()) {
                row.push((format!("{prefix}{axis}"), *x));
            }
        }
        row
    }

    /// CSV with columns `t,a11..a33,bx,by,bz,omega_x,omega_y,omega_z,contact_x,contact_y,contact_z`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.len() {
            let row = self.row(i);
            if i == 0 {
                out.push_str(&csv_line(row.iter().map(|(k, _)| k.clone())));
            }
            out.push_str(&csv_line(row.iter().map(|(_, x)| fmt17(*x))));
        }
        out
    }

    /// JSON array of records with the CSV column names as keys.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = (0..self.len())
            .map(|i| {
                let map: Map<String, Value> = self.row(i).into_iter().map(|(k, x)| (k, Value::from(x))).collect();
                Value::Object(map)
            })
            .collect();
        to_json17(&rows)
    }
}
