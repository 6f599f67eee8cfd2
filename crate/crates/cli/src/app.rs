use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use simplexfactor::align::match_rows_by_cosine;
use simplexfactor::ema::{emma_fit, goodness, EmmaConfig};
use simplexfactor::geometry::average_contribution;
use simplexfactor::ident::{diagnose, IdentReport};
use simplexfactor::io::datasets::BUNDLED;
use simplexfactor::io::reference::reference_solution;
use simplexfactor::io::{budget_plots, bundled, emit_ternary_svg, load_csv, read_factorization, write_csv, write_factorization};
use simplexfactor::io::{Dataset, FactorizationFile};
use simplexfactor::lba::{
    extreme_solution, fit_lba_cwls, fit_lba_em, refined_inner_extreme, Direction, ExtremeSearchConfig, LbaConfig,
};
use simplexfactor::matrix::row_normalize;
use simplexfactor::models::{lba_to_lca, lba_to_nmf, lca_to_lba, nmf_to_lba};
use simplexfactor::nmf::{fit_frobenius, fit_minvol, NmfConfig};
use simplexfactor::plsa::{fit_plsa, PlsaConfig, PlsaForm};
use simplexfactor::{BudgetFactorization, Factorization, FitResult, RowMassVector};

use crate::config::{EstimatorArg, Identify, Model, ObjectiveArg, RunConfig};
use crate::CliError;

/// SSC boundary samples used by `diagnose`.
const SSC_SAMPLES: usize = 2000;

pub fn load_dataset(name: &str) -> Result<Dataset, CliError> {
    if BUNDLED.contains(&name) {
        Ok(bundled(name)?)
    } else if Path::new(name).exists() {
        Ok(load_csv(name)?)
    } else {
        Err(simplexfactor::Error::UnknownDataset(name.to_string()).into())
    }
}

pub fn datasets() -> Result<String, CliError> {
    let mut out = String::new();
    for name in BUNDLED {
        let d = bundled(name)?;
        let _ = writeln!(out, "{name}\t{}x{}\t{}", d.counts.rows(), d.counts.cols(), d.provenance);
    }
    Ok(out)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(",")
}

fn fmt_usize(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Key-value summary, one `key=value` per line in insertion order.
#[derive(Default)]
pub struct Summary(Vec<(String, String)>);

impl Summary {
    fn put(&mut self, key: &str, value: impl ToString) {
        self.0.push((key.to_string(), value.to_string()));
    }

    fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Orders components by decreasing average contribution.
fn canonical_order(b: &BudgetFactorization) -> Result<BudgetFactorization, CliError> {
    let z = average_contribution(b.w());
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &c| z[c].total_cmp(&z[a]).then(a.cmp(&c)));
    let w = b.w().select_cols(&order);
    let g = b.g().select_rows(&order);
    Ok(BudgetFactorization::from_matrices(w, g)?)
}

fn record_fit<F>(s: &mut Summary, fit: &FitResult<F>, objective: &str) {
    s.put("objective_kind", objective);
    s.put("objective", format!("{:.12e}", fit.objective()));
    s.put("iterations", fit.iterations);
    s.put("converged", fit.converged());
    s.put("best_restart", fit.best_restart);
    s.put("flags", format!("{:?}", fit.flags));
}

fn component_labels(k: usize) -> Vec<String> {
    (1..=k).map(|c| format!("component {c}")).collect()
}

pub fn ident_text(r: &IdentReport) -> String {
    let mut s = Summary::default();
    s.put("separable", r.separable);
    s.put("separability_witness", fmt_usize(&r.witness));
    s.put("ssc_status", format!("{:?}", r.ssc.status));
    s.put("ssc_certificate", format!("{:?}", r.ssc.certificate));
    if let Some((inner, outer)) = r.k2 {
        s.put("k2_inner_corner", format!("{:.12},{:.12}", inner.x + 0.0, inner.y + 0.0));
        s.put("k2_outer_corner", format!("{:.12},{:.12}", outer.x + 0.0, outer.y + 0.0));
    }
    for (n, note) in r.notes.iter().enumerate() {
        s.put(&format!("note{}", n + 1), note);
    }
    s.render()
}

fn write_plots(dir: &Path, b: &BudgetFactorization, row_labels: &[String], col_labels: &[String]) -> Result<(), CliError> {
    let (rows, cols) = budget_plots(b, row_labels, col_labels)?;
    emit_ternary_svg(&rows, dir.join("rows.svg"))?;
    emit_ternary_svg(&cols, dir.join("columns.svg"))?;
    Ok(())
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    simplexfactor::Error::Io(format!("{}: {e}", path.display())).into()
}

pub fn fit(cfg: &RunConfig) -> Result<Summary, CliError> {
    let ds = load_dataset(&cfg.data)?;
    let counts = &ds.counts;
    let (p, masses) = row_normalize(counts)?;
    let k = cfg.k;
    let mut s = Summary::default();
    s.put("dataset", &ds.name);
    s.put("model", format!("{:?}", cfg.model).to_lowercase());
    s.put("k", k);
    s.put("seed", cfg.seed);

    // Budget form of the fit plus the factorization to persist, if it is
    // not itself a budget pair.
    let mut lca = None;
    let mut nmf_masses: Option<RowMassVector> = None;
    let budget = match cfg.model {
        Model::Nmf => {
            let objective = cfg.objective.unwrap_or(ObjectiveArg::Frobenius);
            let mut nc = match objective {
                ObjectiveArg::Frobenius => NmfConfig::frobenius(k),
                ObjectiveArg::Minvol => NmfConfig::minvol(k),
            };
            nc.seed = cfg.seed;
            nc.lambda = cfg.lambda;
            if let Some(r) = cfg.restarts {
                nc.restarts = r;
            }
            let fit = match objective {
                ObjectiveArg::Frobenius => {
                    let f = fit_frobenius(counts, &nc)?;
                    record_fit(&mut s, &f, "frobenius");
                    f
                }
                ObjectiveArg::Minvol => {
                    let f = fit_minvol(counts, &nc)?;
                    s.put("lambda", f.lambda);
                    record_fit(&mut s, &f.fit, "minvol");
                    f.fit
                }
            };
            let (b, m) = nmf_to_lba(&fit.factorization)?;
            nmf_masses = Some(m);
            b
        }
        Model::Lba => {
            let mut lc = match cfg.estimator.unwrap_or(EstimatorArg::Cwls) {
                EstimatorArg::Em => LbaConfig::em(k),
                EstimatorArg::Cwls => LbaConfig::cwls(k),
            };
            lc.seed = cfg.seed;
            if let Some(r) = cfg.restarts {
                lc.restarts = r;
            }
            let fit = match cfg.estimator.unwrap_or(EstimatorArg::Cwls) {
                EstimatorArg::Em => {
                    let f = fit_lba_em(counts, &lc)?;
                    record_fit(&mut s, &f, "log_likelihood");
                    f
                }
                EstimatorArg::Cwls => {
                    let f = fit_lba_cwls(&p, &lc)?;
                    record_fit(&mut s, &f, "cwls");
                    f
                }
            };
            fit.factorization
        }
        Model::Ema => {
            let mut ec = EmmaConfig::new(k);
            ec.fcm_seed = cfg.seed;
            if let Some(r) = cfg.restarts {
                ec.restarts = r;
            }
            let f = emma_fit(&p, &ec)?;
            record_fit(&mut s, &f, "negativity");
            f.factorization
        }
        Model::Plsa | Model::Lca => {
            let form = if cfg.model == Model::Plsa { PlsaForm::Asymmetric } else { PlsaForm::Symmetric };
            let mut pc = PlsaConfig::new(k, form);
            pc.seed = cfg.seed;
            if let Some(b) = cfg.beta {
                pc.beta = b;
            }
            if let Some(r) = cfg.restarts {
                pc.restarts = r;
            }
            s.put("beta", pc.beta);
            let f = fit_plsa(counts, &pc)?;
            record_fit(&mut s, &f, "log_likelihood");
            match f.factorization {
                Factorization::Budget(b) => b,
                Factorization::Lca(l) => {
                    let b = lca_to_lba(&l)?;
                    lca = Some(l);
                    b
                }
                Factorization::Nmf(_) => unreachable!("plsa returns budget or latent class parameters"),
            }
        }
    };

    let minvol = cfg.model == Model::Nmf && cfg.objective == Some(ObjectiveArg::Minvol);
    let budget = match cfg.identify {
        Identify::None => {
            s.put("identification", "none");
            budget
        }
        Identify::Inner if minvol => {
            s.put("identification", "inner (minimum volume objective)");
            budget
        }
        Identify::Inner if cfg.model == Model::Lba && cfg.estimator != Some(EstimatorArg::Em) => {
            let (ex, mu) = refined_inner_extreme(&p, &budget, None, cfg.seed)?;
            s.put("identification", "inner");
            s.put("chi_weight", mu);
            s.put("spread_before", ex.initial_objective);
            s.put("spread_after", ex.objective);
            ex.factorization
        }
        Identify::Inner | Identify::Outer => {
            let direction = if cfg.identify == Identify::Inner { Direction::Inner } else { Direction::Outer };
            let mut ec = ExtremeSearchConfig::new(direction, p.col_sums());
            ec.seed = cfg.seed;
            let ex = extreme_solution(&budget, &ec)?;
            s.put("identification", format!("{direction:?}").to_lowercase());
            s.put("spread_before", ex.initial_objective);
            s.put("spread_after", ex.objective);
            ex.factorization
        }
    };
    let budget = if lca.is_some() { budget } else { canonical_order(&budget)? };

    let fitted = budget.product();
    let good = goodness(&p, &fitted);
    s.put("residual_frobenius", format!("{:.12e}", good.frobenius));
    s.put("column_r2", fmt_list(&good.column_r2));
    let z = average_contribution(budget.w());
    s.put("average_contribution", fmt_list(&z));

    if ds.name == "time-budget" && k == 3 {
        let key = match cfg.model {
            Model::Nmf if minvol => Some("nmf"),
            Model::Lba => Some("lba"),
            Model::Ema => Some("ema"),
            _ => None,
        };
        if let Some((rw, rg)) = key.and_then(reference_solution) {
            let perm = match_rows_by_cosine(&rg, budget.g());
            let coef = budget.w().select_cols(&perm).max_abs_diff(&rw);
            let basis = budget.g().select_rows(&perm).max_abs_diff(&rg);
            s.put("reference_alignment", fmt_usize(&perm));
            s.put("reference_coef_maxdiff", format!("{coef:.6}"));
            s.put("reference_basis_maxdiff", format!("{basis:.6}"));
        }
    }

    let factorization = match (&lca, cfg.model) {
        (Some(l), _) => Factorization::Lca(l.clone()),
        (None, Model::Nmf) => {
            let m = nmf_masses.expect("set for nmf");
            Factorization::Nmf(lba_to_nmf(&budget, &m)?)
        }
        _ => Factorization::Budget(budget.clone()),
    };
    let mut file = FactorizationFile::new(factorization, cfg.seed);
    file.row_labels = Some(ds.row_labels.clone());
    file.col_labels = Some(ds.col_labels.clone());
    file.row_mass = Some(masses);

    let report = diagnose(&budget, SSC_SAMPLES, cfg.seed)?;

    let out = &cfg.out;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    write_factorization(out.join("fit.fct"), &file)?;
    let comps = component_labels(k);
    write_csv(out.join("coefficients.csv"), "row", &ds.row_labels, &comps, budget.w())?;
    write_csv(out.join("basis.csv"), "column", &ds.col_labels, &comps, &budget.g().transpose())?;
    fs::write(out.join("ident.txt"), ident_text(&report)).map_err(|e| io_err(out, e))?;
    if k == 3 {
        write_plots(out, &budget, &ds.row_labels, &ds.col_labels)?;
    }
    fs::write(out.join("summary.txt"), s.render()).map_err(|e| io_err(out, e))?;
    Ok(s)
}

impl Summary {
    pub fn text(&self) -> String {
        self.render()
    }
}

/// Budget form of a stored factorization and the row masses that go with it.
fn budget_of(file: &FactorizationFile) -> Result<(BudgetFactorization, Option<RowMassVector>), CliError> {
    Ok(match &file.factorization {
        Factorization::Budget(b) => (b.clone(), file.row_mass.clone()),
        Factorization::Nmf(n) => {
            let (b, m) = nmf_to_lba(n)?;
            (b, Some(m))
        }
        Factorization::Lca(l) => (lca_to_lba(l)?, file.row_mass.clone().or_else(|| Some(l.row_mass()))),
    })
}

fn labels_or_default(labels: &Option<Vec<String>>, n: usize, prefix: &str) -> Vec<String> {
    labels
        .clone()
        .unwrap_or_else(|| (1..=n).map(|i| format!("{prefix} {i}")).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Nmf,
    Lba,
    Lca,
}

pub fn convert(from: &Path, to: Kind, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let file = read_factorization(from)?;
    let (b, masses) = budget_of(&file)?;
    let need_masses = || {
        masses
            .clone()
            .ok_or_else(|| CliError::config("the file has no row masses, which this conversion needs"))
    };
    let factorization = match to {
        Kind::Lba => Factorization::Budget(b),
        Kind::Lca => {
            let m = need_masses()?;
            let shares = RowMassVector::new(m.as_slice().iter().map(|v| v / m.total()).collect())?;
            Factorization::Lca(lba_to_lca(&b, &shares)?)
        }
        Kind::Nmf => Factorization::Nmf(lba_to_nmf(&b, &need_masses()?)?),
    };
    let mut converted = FactorizationFile::new(factorization, file.seed);
    converted.row_labels = file.row_labels;
    converted.col_labels = file.col_labels;
    converted.row_mass = masses;
    let out = out.unwrap_or_else(|| {
        let stem = from.file_stem().and_then(|s| s.to_str()).unwrap_or("fit");
        from.with_file_name(format!("{stem}.{}.fct", format!("{to:?}").to_lowercase()))
    });
    write_factorization(&out, &converted)?;
    Ok(out)
}

pub fn diagnose_file(path: &Path, seed: u64, out: Option<&Path>) -> Result<String, CliError> {
    let file = read_factorization(path)?;
    let (b, _) = budget_of(&file)?;
    let text = ident_text(&diagnose(&b, SSC_SAMPLES, seed)?);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        fs::write(dir.join("ident.txt"), &text).map_err(|e| io_err(dir, e))?;
    }
    Ok(text)
}

pub fn plot(path: &Path, out: &Path) -> Result<(), CliError> {
    let file = read_factorization(path)?;
    let (b, _) = budget_of(&file)?;
    let rows = labels_or_default(&file.row_labels, b.w().rows(), "row");
    let cols = labels_or_default(&file.col_labels, b.g().cols(), "column");
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    write_plots(out, &b, &rows, &cols)
}
