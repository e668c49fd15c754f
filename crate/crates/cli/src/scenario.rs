//! Curated scenarios: worked examples run end to end with PASS/FAIL checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use cstarlab::catalog::{pi_oplus_id_t2, t2_generators, t2_in_m2, toeplitz_base, toeplitz_cover, twisted_corner};
use cstarlab::covers::{compare, extend_by_shilov, spectral_fingerprint, verify_lattice, Relation};
use cstarlab::dilation::{corner_example, is_maximal, semidirichlet_scaling_probe, MaximalityStatus};
use cstarlab::fdca::BlockElement;
use cstarlab::matcore::{herm_eigs, ComplexMatrix, ToleranceConfig, C64};
use cstarlab::opalg::{envelope, is_dirichlet, shilov_ideal};
use cstarlab::word::Word;

use crate::error::{CliError, CliResult};
use crate::report::{num, short, Csv, Report};

pub const SCENARIOS: [&str; 6] = [
    "t2_in_m2",
    "pi_oplus_id_t2",
    "t2_twist_chain",
    "toeplitz_finite",
    "semidirichlet_probe",
    "lattice_maps_roundtrip",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    pub params: BTreeMap<String, String>,
}

impl ScenarioSpec {
    pub fn new(name: &str) -> Self {
        ScenarioSpec {
            name: name.to_string(),
            params: BTreeMap::new(),
        }
    }

    /// Adds `key=value` pairs.
    pub fn with_params<S: AsRef<str>>(mut self, pairs: &[S]) -> CliResult<Self> {
        for p in pairs {
            let (k, v) = p
                .as_ref()
                .split_once('=')
                .ok_or_else(|| CliError::Param(format!("`{}` is not of the form key=value", p.as_ref())))?;
            self.params.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(self)
    }

    fn allow(&self, keys: &[&str]) -> CliResult<()> {
        match self.params.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(CliError::Param(format!("scenario `{}` has no parameter `{k}`", self.name))),
            None => Ok(()),
        }
    }

    fn reals(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        let Some(text) = self.params.get(key) else {
            return Ok(default.to_vec());
        };
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| CliError::Param(format!("`{key}`: `{s}` is not a real number")))
            })
            .collect()
    }

    fn integer(&self, key: &str, default: usize, min: usize, max: usize) -> CliResult<usize> {
        let Some(text) = self.params.get(key) else {
            return Ok(default);
        };
        text.parse::<usize>()
            .ok()
            .filter(|n| (min..=max).contains(n))
            .ok_or_else(|| CliError::Param(format!("`{key}` must be an integer in [{min}, {max}], got `{text}`")))
    }
}

/// Runs a registered scenario with all randomness drawn from `seed`.
pub fn run_scenario(spec: &ScenarioSpec, seed: u64) -> CliResult<Report> {
    let tol = ToleranceConfig::with_seed(seed);
    match spec.name.as_str() {
        "t2_in_m2" => {
            spec.allow(&[])?;
            t2_in_m2_scenario(&tol)
        }
        "pi_oplus_id_t2" => {
            spec.allow(&[])?;
            pi_oplus_id_scenario(&tol)
        }
        "t2_twist_chain" => {
            spec.allow(&["s", "grid"])?;
            let ss = spec.reals("s", &[0.0, 0.3, 0.6, 0.9, 1.0])?;
            if let Some(s) = ss.iter().find(|s| !(0.0..=1.0).contains(*s)) {
                return Err(CliError::Param(format!("`s` values must lie in [0, 1], got {s}")));
            }
            twist_chain_scenario(&ss, spec.integer("grid", 101, 2, 100_000)?, &tol)
        }
        "toeplitz_finite" => {
            spec.allow(&["n", "z"])?;
            let zs = spec.reals("z", &[0.3, 0.6, 0.9])?;
            if let Some(z) = zs.iter().find(|z| !(0.0..=1.0).contains(*z)) {
                return Err(CliError::Param(format!("`z` values must lie in [0, 1], got {z}")));
            }
            toeplitz_scenario(spec.integer("n", 8, 2, 16)?, &zs, &tol)
        }
        "semidirichlet_probe" => {
            spec.allow(&[])?;
            semidirichlet_scenario(&tol)
        }
        "lattice_maps_roundtrip" => {
            spec.allow(&[])?;
            lattice_scenario(&tol)
        }
        other => Err(CliError::UnknownScenario(other.to_string())),
    }
}

fn t2_in_m2_scenario(tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("t2_in_m2");
    let a = t2_in_m2(tol)?;
    r.line(format!("dim A = {}", a.dim()));
    let shilov = shilov_ideal(&a, tol)?;
    r.line(format!("Shilov ideal = {shilov}"));
    r.check("Shilov ideal is zero", shilov.is_empty());
    let env = envelope(&a, tol)?;
    r.line(format!("envelope target = {:?}", env.target().sizes()));
    r.check("envelope = M2", env.target().sizes() == [2]);
    r.check("T2 + T2* = M2", is_dirichlet(&a, tol));
    let v = is_maximal(&a, &t2_generators(), tol)?;
    r.line(format!("identity representation: {} ({})", v.status, v.evidence));
    r.check("identity representation is maximal", v.status == MaximalityStatus::Maximal);
    Ok(r)
}

fn pi_oplus_id_scenario(tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("pi_oplus_id_t2");
    let a = pi_oplus_id_t2(tol)?;
    let shilov = shilov_ideal(&a, tol)?;
    r.line(format!("Shilov ideal = {shilov}"));
    r.check("Shilov = block 1", shilov.one_based() == [1]);
    let env = envelope(&a, tol)?;
    r.line(format!("envelope target = {:?}", env.target().sizes()));
    r.check("envelope = M2", env.target().sizes() == [2]);

    let ext = extend_by_shilov(&a, tol)?;
    let api = ext.extended();
    r.line(format!("dim A = {}, dim(A+I) = {}", a.dim(), api.dim()));
    r.check("A ∩ I = 0", api.dim() == a.dim() + ext.ideal().deleted_dim());
    let sh = a.ambient();
    let one = C64::new(1.0, 0.0);
    let mut expected = vec![BlockElement::new(sh, vec![ComplexMatrix::diag(&[one]), ComplexMatrix::zeros(2, 2)])?];
    for g in t2_generators() {
        expected.push(BlockElement::new(sh, vec![ComplexMatrix::zeros(1, 1), g])?);
    }
    let matches = api.dim() == expected.len() && expected.iter().all(|x| api.contains(x, tol));
    r.check("A+I = C ⊕ T2", matches);
    let api_shilov = shilov_ideal(api, tol)?;
    r.line(format!("Shilov ideal of A+I = {api_shilov}"));
    r.check("Shilov ideal of A+I is zero", api_shilov.is_empty());

    let lattice = verify_lattice(&a, tol)?;
    let roundtrips = lattice
        .checks
        .iter()
        .filter(|c| c.name.starts_with("QN") || c.name.starts_with("NQ"))
        .collect::<Vec<_>>();
    r.check(
        format!("QN = NQ = id ({} checks)", roundtrips.len()),
        !roundtrips.is_empty() && roundtrips.iter().all(|c| c.pass),
    );
    Ok(r)
}

fn twist_chain_scenario(ss: &[f64], grid: usize, tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("t2_twist_chain");
    let mut csv = Csv::new(&["s", "t", "index", "eigenvalue"]);
    let mut ranges = Vec::new();
    for &s in ss {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut inside = true;
        for i in 0..grid {
            let t = i as f64 / (grid - 1) as f64;
            let a = twisted_corner(s, t);
            let e = herm_eigs(&(&a.adjoint() * &a), tol)?;
            for (k, &ev) in e.iter().enumerate() {
                csv.push(vec![num(s), num(t), k.to_string(), num(ev)]);
                inside &= ev >= s.powi(4) - 1e-8 && ev <= 1.0 + 1e-8;
            }
            lo = lo.min(e[0]);
            hi = hi.max(e[e.len() - 1]);
        }
        let end = herm_eigs(&{
            let a = twisted_corner(s, 1.0);
            &a.adjoint() * &a
        }, tol)?;
        let (e0, e1) = (end[0].max(0.0).sqrt(), end[1].max(0.0).sqrt());
        r.line(format!(
            "s={}: spectrum of |A_s| ⊆ [{}, 1], observed [{}, {}]",
            short(s),
            short(s * s),
            short(lo.max(0.0).sqrt()),
            short(hi.max(0.0).sqrt())
        ));
        r.check(format!("s={}: eigenvalues of A_s*A_s in [s^4, 1]", short(s)), inside);
        r.check(
            format!("s={}: endpoints s^2 and 1 attained at t=1", short(s)),
            (e0 - s * s).abs() <= 1e-6 && (e1 - 1.0).abs() <= 1e-6,
        );
        ranges.push((s, lo.max(0.0).sqrt(), hi.max(0.0).sqrt()));
    }
    let mut sorted = ranges.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for w in sorted.windows(2) {
        let ((s1, _, _), (s2, lo2, hi2)) = (w[0], w[1]);
        // the observed spectrum for the larger parameter sits inside the
        // interval certified for the smaller one
        r.check(
            format!("[{}, 1] ⊇ [{}, 1] ⊇ spectrum at s={}", short(s1 * s1), short(s2 * s2), short(s2)),
            s1 * s1 <= s2 * s2 && lo2 >= s2 * s2 - 1e-6 && hi2 <= 1.0 + 1e-6,
        );
    }
    r.csv = Some(csv);
    Ok(r)
}

fn toeplitz_scenario(n: usize, zs: &[f64], tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("toeplitz_finite");
    let base = Arc::new(toeplitz_base(n, tol)?);
    let covers = zs
        .iter()
        .map(|&z| toeplitz_cover(&base, n, C64::new(z, 0.0), tol))
        .collect::<cstarlab::Result<Vec<_>>>()?;
    let word = Word::parse("g0* g0")?;
    let mut csv = Csv::new(&["z_re", "z_im", "index", "eigenvalue"]);
    for (c, &z) in covers.iter().zip(zs) {
        let f = spectral_fingerprint(c, &word, tol)?;
        for (k, v) in f.iter().enumerate() {
            csv.push(vec![num(z), num(0.0), k.to_string(), num(*v)]);
        }
        let mut expected = vec![0.0, z * z, 1.0];
        expected.sort_by(f64::total_cmp);
        expected.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
        let shown: Vec<String> = f.iter().map(|v| short(*v)).collect();
        r.line(format!("z={}: spectrum of V_z*V_z ⊕ V_1*V_1 = {{{}}}", short(z), shown.join(", ")));
        r.check(
            format!("z={}: fingerprint = {{0, z^2, 1}}", short(z)),
            f.len() == expected.len() && f.iter().zip(&expected).all(|(a, b)| (a - b).abs() <= 1e-9),
        );
    }
    for i in 0..covers.len() {
        for j in i + 1..covers.len() {
            let o = compare(&covers[i], &covers[j], tol)?;
            r.line(format!("z={} vs z={}: {}", short(zs[i]), short(zs[j]), o.relation));
            r.check(
                format!("z={} and z={} are incomparable", short(zs[i]), short(zs[j])),
                o.relation == Relation::Incomparable,
            );
        }
    }
    r.csv = Some(csv);
    Ok(r)
}

fn semidirichlet_scenario(tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("semidirichlet_probe");
    let t2 = t2_in_m2(tol)?;
    r.check("T2 + T2* = M2", is_dirichlet(&t2, tol));
    let (a, phi, split) = corner_example(tol)?;
    let p = semidirichlet_scaling_probe(&a, &phi, split, tol)?;
    r.line(format!("corner norm = {}", short(p.corner_norm)));
    r.line(format!("Φ semi-Dirichlet: {}", p.original));
    r.line(format!("Φ' semi-Dirichlet: {}", p.scaled));
    r.line(format!("Φ ⊕ Φ' semi-Dirichlet: {}", p.joint));
    r.check("at least one of Φ, Φ' is not semi-Dirichlet", p.at_least_one_fails());
    let mut csv = Csv::new(&["scale", "semi_dirichlet"]);
    for (s, ok) in &p.family {
        csv.push(vec![num(*s), u8::from(*ok).to_string()]);
    }
    r.csv = Some(csv);
    Ok(r)
}

fn lattice_scenario(tol: &ToleranceConfig) -> CliResult<Report> {
    let mut r = Report::new("lattice_maps_roundtrip");
    let a = pi_oplus_id_t2(tol)?;
    let report = verify_lattice(&a, tol)?;
    r.line(format!("Shilov ideal = {}, dim(A+I) = {}", report.shilov, report.extension_dim));
    let show = |v: &[cstarlab::fdca::Ideal]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
    r.line(format!("boundary ideals of the A ambient: {}", show(&report.a_ideals)));
    r.line(format!("boundary ideals of the A+I ambient: {}", show(&report.api_ideals)));
    for c in &report.checks {
        r.check(format!("{} ({})", c.name, c.relation), c.pass);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_scenarios_and_parameters_are_rejected() {
        assert!(matches!(run_scenario(&ScenarioSpec::new("nope"), 0), Err(CliError::UnknownScenario(_))));
        let bad = ScenarioSpec::new("t2_in_m2").with_params(&["x=1"]).unwrap();
        assert!(matches!(run_scenario(&bad, 0), Err(CliError::Param(_))));
        assert!(ScenarioSpec::new("t2_twist_chain").with_params(&["s"]).is_err());
        let range = ScenarioSpec::new("t2_twist_chain").with_params(&["s=1.5"]).unwrap();
        assert!(matches!(run_scenario(&range, 0), Err(CliError::Param(_))));
    }

    #[test]
    fn twist_chain_single_parameter() {
        let spec = ScenarioSpec::new("t2_twist_chain").with_params(&["s=0.5", "grid=101"]).unwrap();
        let r = run_scenario(&spec, 0).unwrap();
        assert!(r.passed(), "{}", r.render());
        assert!(r.render().contains("spectrum of |A_s| ⊆ [0.250000, 1]"));
        let csv = r.csv.unwrap();
        assert_eq!(csv.len(), 202);
        assert!(csv.render().starts_with("s,t,index,eigenvalue\n"));
    }
}
