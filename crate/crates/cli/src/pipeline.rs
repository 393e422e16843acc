//! Staged pipeline behind the subcommands. Stages share one lazily
//! filled context; the window and weight table additionally round-trip
//! through the on-disk cache so repeated runs skip the expensive work.

use std::path::PathBuf;

use serde::Serialize;

use bconv_core::equi::{criterion_series_w, table1};
use bconv_core::exchange::{
    discover_translations, orbit_with_cocycle, successor_chain, DomainExchangeSpec, OrbitRecord,
    SuccessorChain,
};
use bconv_core::field::{find_and_classify, parse_polynomial, ConjugateSystem, LatticeVector};
use bconv_core::limit::{
    build_garsia_graph, eigen_residual, lambda_estimate, weight_table, LambdaEstimate, WeightTable,
};
use bconv_core::measure::{criterion_series, g_lebesgue_integral, mu_n};
use bconv_core::window::{condition1_against, fractal_approx, figure1_cloud, FractalApprox, XBarWindow};

use crate::cache;
use crate::config::RunConfig;
use crate::report::{csv, svg_line, svg_scatter, write_json, write_text};
use crate::CliError;

/// Growth-rate iteration tolerance. Fixed rather than configurable: the
/// estimate is cheap and everything downstream assumes it is converged.
const LAMBDA_TOL: f64 = 1e-9;

/// The measure iteration is exact but its support grows geometrically;
/// past this depth the CSV stage would dominate the whole pipeline.
const COUNT_DEPTH_CAP: usize = 12;

/// Cylinder refinement depth for the cocycle regularity table.
const REGULARITY_DEPTH: usize = 6;

/// SVG scatter plots thin dense clouds to this many points.
const SVG_POINT_CAP: usize = 20_000;

pub struct Pipeline {
    cfg: RunConfig,
    sys: ConjugateSystem,
    window: Option<XBarWindow>,
    ftable: Option<WeightTable>,
    lambda: Option<LambdaEstimate>,
    chain: Option<SuccessorChain>,
    fractal: Option<FractalApprox>,
}

fn coords_of(v: &LatticeVector) -> Vec<i64> {
    v.coords.to_vec()
}

fn coords_field(v: &LatticeVector) -> String {
    v.coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct RootJson {
    re: f64,
    im: f64,
    modulus: f64,
    is_real: bool,
    expanding: bool,
    free: bool,
}

#[derive(Serialize)]
struct AnalyzeJson {
    poly: Vec<i64>,
    degree: usize,
    beta: f64,
    free_value: f64,
    free_modulus: f64,
    strip_dimension: usize,
    contracting_dimension: usize,
    strip_half_widths: Vec<f64>,
    interval_half_width: f64,
    escape_threshold: f64,
    attractor_radius: f64,
    contracting_rho: f64,
    roots: Vec<RootJson>,
}

#[derive(Serialize)]
struct CriterionJson {
    reference_constant: f64,
    g_integral_analytic: f64,
    g_integral_from_profile: f64,
    mass_identity_holds: bool,
    /// Decimal strings: the masses outgrow every JSON-safe integer width.
    masses: Vec<String>,
    terms: Vec<f64>,
    partial_sums: Vec<f64>,
}

#[derive(Serialize)]
struct Condition1Json {
    free_bound: f64,
    fractal_depth: usize,
    eps_r: f64,
    candidates: usize,
    inside: usize,
    outside: usize,
    uncertain: usize,
    uncertain_fraction: f64,
    counterexamples: Vec<Vec<i64>>,
    window_size: usize,
    window_never_outside: bool,
    consistent: bool,
}

#[derive(Serialize)]
struct LambdaJson {
    graph_states: usize,
    value: f64,
    residual: f64,
    iterations: usize,
    ratio_value: f64,
    ratio_depth: usize,
    agree: bool,
    threshold: f64,
    margin: f64,
}

#[derive(Serialize)]
struct EigenJson {
    max_relative_residual: f64,
    interior_points: usize,
    window_points: usize,
    f0: f64,
    q: f64,
    flagged: usize,
}

#[derive(Serialize)]
struct PiecesJson {
    chain_len: usize,
    free_reach: f64,
    distinct_gaps: usize,
    pieces: usize,
    first_half_pieces: usize,
    stable: bool,
    translations: Vec<Vec<i64>>,
    piece_counts: Vec<usize>,
}

#[derive(Serialize)]
struct CocycleJson {
    steps: usize,
    telescoping_defect: f64,
    max_abs_increment: f64,
}

#[derive(Serialize)]
struct CriterionWJson {
    mode: String,
    lambda: f64,
    reference_constant: f64,
    hypothesis_holds: bool,
    bounds: Vec<f64>,
    masses: Vec<f64>,
    terms: Vec<f64>,
    partial_sums: Vec<f64>,
}

impl Pipeline {
    pub fn new(cfg: RunConfig) -> Result<Pipeline, CliError> {
        let poly = parse_polynomial(&cfg.poly)?;
        let sys = find_and_classify(&poly, cfg.free_override)?;
        if cfg.b < sys.escape_threshold() {
            return Err(CliError::Config(format!(
                "b = {} is below the escape threshold {}; no window exists there",
                cfg.b,
                sys.escape_threshold()
            )));
        }
        Ok(Pipeline {
            cfg,
            sys,
            window: None,
            ftable: None,
            lambda: None,
            chain: None,
            fractal: None,
        })
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.out.join(name)
    }

    fn emit(&self, name: &str) {
        println!("wrote {}", self.out(name).display());
    }

    fn window(&mut self) -> Result<&XBarWindow, CliError> {
        if self.window.is_none() {
            let w = match cache::load_window(&self.cfg) {
                Some(w) => w,
                None => {
                    let w = bconv_core::window::generate_xbar(
                        &self.sys,
                        self.cfg.b,
                        self.cfg.window_cap,
                    )?;
                    cache::store_window(&self.cfg, &w)?;
                    w
                }
            };
            self.window = Some(w);
        }
        Ok(self.window.as_ref().unwrap())
    }

    fn lambda(&mut self) -> Result<&LambdaEstimate, CliError> {
        if self.lambda.is_none() {
            let graph = build_garsia_graph(&self.sys, self.cfg.window_cap)?;
            self.lambda = Some(lambda_estimate(&graph, &self.sys, LAMBDA_TOL)?);
        }
        Ok(self.lambda.as_ref().unwrap())
    }

    fn ftable(&mut self) -> Result<&WeightTable, CliError> {
        if self.ftable.is_none() {
            let t = match cache::load_ftable(&self.cfg) {
                Some(t) => t,
                None => {
                    let lambda = self.lambda()?.value;
                    let t = weight_table(
                        &self.sys,
                        self.cfg.n_stab,
                        lambda,
                        self.cfg.b,
                        self.cfg.window_cap,
                    )?;
                    cache::store_ftable(&self.cfg, &t)?;
                    t
                }
            };
            self.ftable = Some(t);
        }
        Ok(self.ftable.as_ref().unwrap())
    }

    fn chain(&mut self) -> Result<&SuccessorChain, CliError> {
        if self.chain.is_none() {
            self.window()?;
            let c = successor_chain(self.window.as_ref().unwrap(), &self.sys)?;
            self.chain = Some(c);
        }
        Ok(self.chain.as_ref().unwrap())
    }

    fn fractal(&mut self) -> Result<&FractalApprox, CliError> {
        if self.fractal.is_none() {
            self.fractal = Some(fractal_approx(
                &self.sys,
                self.cfg.k,
                None,
                self.cfg.window_cap,
            )?);
        }
        Ok(self.fractal.as_ref().unwrap())
    }

    pub fn analyze(&mut self) -> Result<(), CliError> {
        let sys = &self.sys;
        let roots = sys
            .reps
            .iter()
            .enumerate()
            .map(|(i, r)| RootJson {
                re: r.value.re,
                im: r.value.im,
                modulus: r.value.norm(),
                is_real: r.is_real,
                expanding: r.expanding,
                free: i == sys.free,
            })
            .collect();
        let json = AnalyzeJson {
            poly: self.cfg.poly.clone(),
            degree: sys.degree(),
            beta: sys.beta(),
            free_value: sys.free_value(),
            free_modulus: sys.free_modulus(),
            strip_dimension: sys.d(),
            contracting_dimension: sys.s(),
            strip_half_widths: (0..sys.d()).map(|j| sys.strip_half_width(j)).collect(),
            interval_half_width: sys.interval_half_width(),
            escape_threshold: sys.escape_threshold(),
            attractor_radius: sys.attractor_radius(),
            contracting_rho: sys.contracting_rho(),
            roots,
        };
        write_json(&self.out("analyze.json"), &json)?;
        self.emit("analyze.json");
        Ok(())
    }

    pub fn count(&mut self) -> Result<(), CliError> {
        let depth = self.cfg.n_max.min(COUNT_DEPTH_CAP);
        let mut rows = Vec::new();
        for n in 0..=depth {
            let m = mu_n(n, &self.sys, self.cfg.atom_cap)?;
            rows.push(vec![
                n.to_string(),
                m.len().to_string(),
                m.total_mass().to_string(),
            ]);
        }
        write_text(&self.out("masses.csv"), &csv("n,atoms,mass", rows))?;
        self.emit("masses.csv");

        let cs = criterion_series(depth, &self.sys, self.cfg.atom_cap)?;
        let gi = g_lebesgue_integral(&self.sys)?;
        let json = CriterionJson {
            reference_constant: cs.reference_constant,
            g_integral_analytic: gi.analytic,
            g_integral_from_profile: gi.from_profile,
            mass_identity_holds: cs.mass_identity_holds,
            masses: cs.masses.iter().map(|m| m.to_string()).collect(),
            terms: cs.terms.clone(),
            partial_sums: cs.partial_sums.clone(),
        };
        write_json(&self.out("criterion.json"), &json)?;
        self.emit("criterion.json");
        Ok(())
    }

    pub fn lattice(&mut self) -> Result<(), CliError> {
        self.fractal()?;
        self.window()?;
        let sys = &self.sys;
        let window = self.window.as_ref().unwrap();
        let rows = window.points.iter().map(|v| {
            vec![
                coords_field(v),
                sys.pe(v).to_string(),
                sys.pf(v).to_string(),
                sys.pc(v).norm().to_string(),
            ]
        });
        write_text(
            &self.out("window.csv"),
            &csv("coords,base,free,contracting_abs", rows),
        )?;
        self.emit("window.csv");

        let report = condition1_against(
            sys,
            window,
            self.fractal.as_ref().unwrap(),
            self.cfg.eps_r,
        )?;
        let json = Condition1Json {
            free_bound: report.free_bound,
            fractal_depth: report.fractal_depth,
            eps_r: report.eps_r,
            candidates: report.candidates,
            inside: report.inside,
            outside: report.outside,
            uncertain: report.uncertain,
            uncertain_fraction: report.uncertain as f64 / report.candidates.max(1) as f64,
            counterexamples: report.counterexamples.iter().map(coords_of).collect(),
            window_size: report.window_size,
            window_never_outside: report.window_never_outside,
            consistent: report.consistent,
        };
        write_json(&self.out("condition1.json"), &json)?;
        self.emit("condition1.json");
        Ok(())
    }

    pub fn fractal_stage(&mut self) -> Result<(), CliError> {
        self.fractal()?;
        let cloud = &self.fractal.as_ref().unwrap().points;
        let rows = cloud
            .iter()
            .map(|c| vec![c.re.to_string(), c.im.to_string()]);
        write_text(&self.out("fractal_cloud.csv"), &csv("re,im", rows))?;
        self.emit("fractal_cloud.csv");

        let pts: Vec<(f64, f64)> = cloud.iter().map(|c| (c.re, c.im)).collect();
        let stride = pts.len().div_ceil(SVG_POINT_CAP).max(1);
        let thinned: Vec<(f64, f64)> = pts.iter().copied().step_by(stride).collect();
        write_text(
            &self.out("fractal.svg"),
            &svg_scatter(&thinned, 1.2, "contracting-plane attractor cloud"),
        )?;
        self.emit("fractal.svg");

        let fig = figure1_cloud(&self.sys, 6, self.cfg.window_cap)?;
        let rows = fig
            .iter()
            .map(|(x, y)| vec![x.to_string(), y.to_string()]);
        write_text(&self.out("figure_cloud.csv"), &csv("base,free", rows))?;
        self.emit("figure_cloud.csv");
        write_text(
            &self.out("figure.svg"),
            &svg_scatter(&fig, 2.0, "level-6 difference cloud (base, free)"),
        )?;
        self.emit("figure.svg");
        Ok(())
    }

    pub fn lambda_stage(&mut self) -> Result<(), CliError> {
        let graph_states = build_garsia_graph(&self.sys, self.cfg.window_cap)?.len();
        let threshold = 4.0 / self.sys.beta();
        let json = {
            let lam = self.lambda()?;
            LambdaJson {
                graph_states,
                value: lam.value,
                residual: lam.residual,
                iterations: lam.iterations,
                ratio_value: lam.ratio_value,
                ratio_depth: lam.ratio_depth,
                agree: lam.agree,
                threshold,
                margin: threshold - lam.value,
            }
        };
        let lambda = json.value;
        write_json(&self.out("lambda.json"), &json)?;
        self.emit("lambda.json");

        self.window()?;
        self.ftable()?;
        let residual = eigen_residual(
            self.ftable.as_ref().unwrap(),
            lambda,
            self.window.as_ref().unwrap(),
            &self.sys,
        )?;
        let t = self.ftable.as_ref().unwrap();
        let json = EigenJson {
            max_relative_residual: residual.max_relative,
            interior_points: residual.interior_points,
            window_points: residual.window_points,
            f0: t.f0,
            q: t.q,
            flagged: t.flagged,
        };
        write_json(&self.out("eigen.json"), &json)?;
        self.emit("eigen.json");
        Ok(())
    }

    pub fn det(&mut self) -> Result<(), CliError> {
        self.chain()?;
        let chain = self.chain.as_ref().unwrap();
        let mut rows = Vec::with_capacity(chain.len());
        for (k, v) in chain.points.iter().enumerate() {
            let gap = chain
                .gaps
                .get(k)
                .map(|g| g.to_string())
                .unwrap_or_default();
            rows.push(vec![
                k.to_string(),
                coords_field(v),
                chain.free_values[k].to_string(),
                gap,
            ]);
        }
        write_text(&self.out("chain.csv"), &csv("k,coords,free,gap", rows))?;
        self.emit("chain.csv");

        let spec = discover_translations(chain, &self.sys)?;
        let mut piece_counts = vec![0usize; spec.piece_count()];
        for &p in &spec.assignment {
            piece_counts[p] += 1;
        }
        let json = PiecesJson {
            chain_len: chain.len(),
            free_reach: chain.free_reach(),
            distinct_gaps: chain.distinct_gaps(self.cfg.delta).len(),
            pieces: spec.piece_count(),
            first_half_pieces: spec.first_half_pieces,
            stable: spec.stability_error().is_none(),
            translations: spec.translations.iter().map(coords_of).collect(),
            piece_counts,
        };
        write_json(&self.out("pieces.json"), &json)?;
        self.emit("pieces.json");

        self.ftable()?;
        let orbit = orbit_with_cocycle(
            self.chain.as_ref().unwrap(),
            &spec,
            self.ftable.as_ref().unwrap(),
            &self.sys,
        )?;
        self.write_cocycle_reports(&spec, &orbit)?;
        Ok(())
    }

    fn write_cocycle_reports(
        &mut self,
        spec: &DomainExchangeSpec,
        orbit: &OrbitRecord,
    ) -> Result<(), CliError> {
        let defect = orbit
            .log_weights_direct
            .iter()
            .zip(&orbit.log_weights_cocycle)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        self.fractal()?;
        let reg = bconv_core::exchange::cocycle_regularity(
            orbit,
            spec,
            self.fractal.as_ref().unwrap(),
            &self.sys,
            REGULARITY_DEPTH,
        )?;
        let json = CocycleJson {
            steps: orbit.increments.len(),
            telescoping_defect: defect,
            max_abs_increment: reg.max_abs_increment,
        };
        write_json(&self.out("cocycle.json"), &json)?;
        self.emit("cocycle.json");

        let rows = reg.rows.iter().map(|r| {
            vec![
                r.depth.to_string(),
                r.occupied_cells.to_string(),
                r.max_spread.to_string(),
                r.mean_spread.to_string(),
            ]
        });
        write_text(
            &self.out("regularity.csv"),
            &csv("depth,occupied_cells,max_spread,mean_spread", rows),
        )?;
        self.emit("regularity.csv");
        Ok(())
    }

    pub fn equi(&mut self) -> Result<(), CliError> {
        self.chain()?;
        self.ftable()?;
        let lambda = self.lambda()?.value;
        let chain = self.chain.as_ref().unwrap();
        let ftable = self.ftable.as_ref().unwrap();

        let report = table1(chain, ftable, &self.sys, self.cfg.n_max)?;
        let rows = report.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.bound.to_string(),
                r.atoms.to_string(),
                r.w1.to_string(),
            ]
        });
        write_text(&self.out("table1.csv"), &csv("n,bound,atoms,w1", rows))?;
        self.emit("table1.csv");

        let series: Vec<(f64, f64)> = report
            .rows
            .iter()
            .map(|r| (r.n as f64, r.w1))
            .collect();
        write_text(
            &self.out("table1.svg"),
            &svg_line(&series, "W1 distance to uniform vs truncation level"),
        )?;
        self.emit("table1.svg");

        let cs = criterion_series_w(
            chain,
            ftable,
            &self.sys,
            lambda,
            self.cfg.n_max,
            self.cfg.mode.truncation(),
        )?;
        let json = CriterionWJson {
            mode: self.cfg.mode.to_string(),
            lambda,
            reference_constant: cs.reference_constant,
            hypothesis_holds: cs.hypothesis_holds,
            bounds: cs.bounds.clone(),
            masses: cs.masses.clone(),
            terms: cs.terms.clone(),
            partial_sums: cs.partial_sums.clone(),
        };
        write_json(&self.out("criterion_w.json"), &json)?;
        self.emit("criterion_w.json");
        Ok(())
    }

    pub fn all(&mut self) -> Result<(), CliError> {
        self.analyze()?;
        self.count()?;
        self.lattice()?;
        self.fractal_stage()?;
        self.lambda_stage()?;
        self.det()?;
        self.equi()
    }
}
