//! Subcommand implementations. Each returns (kind, payload, csv, human)
//! and the caller wraps it in the report envelope.

use crate::args::*;
use crate::config::{parse_count, parse_count_list, parse_exponent, parse_f64_list};
use crate::output::{fmt_f64, Csv};
use crate::CliError;
use pslab_core::asymptotics::{self, SigmaInterval};
use pslab_core::counting::{self, CountMethod, CountVariant};
use pslab_core::exactmath::ExactC;
use pslab_core::exppair::{self, Objective, PairWord};
use pslab_core::expsum::{self, BilinearParams, CoeffKind, TripleParams};
use pslab_core::hbdecomp::{self, HBParams};
use pslab_core::sieve::{self, Sieve};
use pslab_core::vaaler;
use serde::Serialize;
use serde_json::Value;

pub struct CommandOutput {
    pub payload: Value,
    pub csv: Csv,
    pub human: String,
}

fn ok<T: Serialize>(payload: T, csv: Csv, human: String) -> Result<CommandOutput, CliError> {
    Ok(CommandOutput {
        payload: serde_json::to_value(payload).expect("payload serialization"),
        csv,
        human,
    })
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_c(s: &str, relaxed: bool) -> Result<ExactC, CliError> {
    ExactC::parse(s, relaxed).map_err(|e| usage(e.to_string()))
}

fn budgeted_sieve(limit: u64, mem_budget: u64) -> Result<Sieve, CliError> {
    Sieve::try_up_to(limit, mem_budget).map_err(|e| CliError::Resource(e.to_string()))
}

pub struct Globals {
    pub eps: f64,
    pub seed: u64,
    pub mem_budget: u64,
    pub stable: bool,
}

pub fn run_count(a: &CountArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let c = parse_c(&a.c, a.relaxed)?;
    let x = parse_count(&a.x).map_err(|e| usage(e.to_string()))?;
    let variant = CountVariant::parse(&a.variant)
        .ok_or_else(|| usage(format!("unknown variant `{}` (all|sqfree|consec)", a.variant)))?;
    let method = CountMethod::parse(&a.method)
        .ok_or_else(|| usage(format!("unknown method `{}` (direct|interval|both)", a.method)))?;
    if x < 2 {
        return Err(usage(format!("x must be at least 2, got {}", x)));
    }
    let limit = counting::required_sieve_limit(&c, x);
    let s = budgeted_sieve(limit, g.mem_budget)?;
    let mut report = counting::count_with_report(&c, x, variant, method, &s)
        .map_err(|e| usage(e.to_string()))?;
    if g.stable {
        report.wall_time_s = 0.0;
    }

    let mut csv = Csv::new("c,x,variant,method,count,z,in_theorem_range,wall_time_s");
    csv.row(&[
        report.c.clone(),
        report.x.to_string(),
        report.variant.as_str().to_string(),
        format!("{:?}", report.method).to_lowercase(),
        report.count.to_string(),
        fmt_f64(report.z),
        report.in_theorem_range.to_string(),
        fmt_f64(report.wall_time_s),
    ]);
    let human = format!(
        "count({}, x = {}, {}) = {}  [method: {}, theorem range: {}]",
        report.c,
        report.x,
        report.variant.as_str(),
        report.count,
        a.method,
        if report.in_theorem_range { "yes" } else { "NO (exploratory c)" },
    );
    ok(report, csv, human)
}

#[derive(Serialize)]
struct AsymPayload {
    rows: Vec<asymptotics::AsymReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma: Option<SigmaInterval>,
}

pub fn run_asym(a: &AsymArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let c = parse_c(&a.c, a.relaxed)?;
    let grid = parse_count_list(&a.x_grid).map_err(|e| usage(e.to_string()))?;
    let variant = CountVariant::parse(&a.variant)
        .ok_or_else(|| usage(format!("unknown variant `{}`", a.variant)))?;
    if grid.is_empty() || grid.iter().any(|&x| x < 3) {
        return Err(usage("x grid must be nonempty with every x >= 3"));
    }
    let sigma = if variant == CountVariant::Consecutive {
        let lim = parse_count(&a.sigma_limit).map_err(|e| usage(e.to_string()))?;
        Some(
            asymptotics::sigma_constant(lim)
                .map_err(|e| usage(e.to_string()))?,
        )
    } else {
        None
    };
    let max_x = *grid.iter().max().unwrap();
    let s = budgeted_sieve(counting::required_sieve_limit(&c, max_x), g.mem_budget)?;

    let mut rows = Vec::new();
    let mut csv = Csv::new("x,count,main,ratio,scaled_error");
    for &x in &grid {
        let cr = counting::count_with_report(&c, x, variant, CountMethod::Direct, &s)
            .map_err(|e| usage(e.to_string()))?;
        let main = match variant {
            CountVariant::All => asymptotics::main_term_all(&c, x),
            CountVariant::Squarefree => asymptotics::main_term_sqfree(&c, x),
            CountVariant::Consecutive => {
                let (lo, hi) = asymptotics::main_term_consec(&c, x, sigma.as_ref().unwrap());
                0.5 * (lo + hi)
            }
        };
        let r = asymptotics::asym_report(&cr, main);
        csv.row(&[
            r.x.to_string(),
            r.exact_count.to_string(),
            fmt_f64(r.main_term),
            fmt_f64(r.ratio),
            fmt_f64(r.scaled_error),
        ]);
        rows.push(r);
    }
    let human = rows
        .iter()
        .map(|r| {
            format!(
                "x = {:>10}: count = {:>9}, main = {:>14.2}, ratio = {:.5}, scaled_error = {:.4}",
                r.x, r.exact_count, r.main_term, r.ratio, r.scaled_error
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    ok(AsymPayload { rows, sigma }, csv, human)
}

#[derive(Serialize)]
struct SigmaPayload {
    lo: f64,
    hi: f64,
    width: f64,
    prime_limit: u64,
}

pub fn run_sigma(a: &SigmaArgs, _g: &Globals) -> Result<CommandOutput, CliError> {
    let limit = parse_count(&a.prime_limit).map_err(|e| usage(e.to_string()))?;
    let s = asymptotics::sigma_constant(limit).map_err(|e| usage(e.to_string()))?;
    let payload = SigmaPayload { lo: s.lo, hi: s.hi, width: s.width(), prime_limit: limit };
    let mut csv = Csv::new("prime_limit,lo,hi,width");
    csv.row(&[
        limit.to_string(),
        format!("{:.17}", s.lo),
        format!("{:.17}", s.hi),
        fmt_f64(s.width()),
    ]);
    let human = format!(
        "sigma in [{:.17}, {:.17}]  (width {:.3e}, primes up to {})",
        s.lo,
        s.hi,
        s.width(),
        limit
    );
    ok(payload, csv, human)
}

#[derive(Serialize)]
struct ExppairPayload {
    word: String,
    kappa: String,
    lambda: String,
    kappa_decimal: f64,
    lambda_decimal: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<String>,
}

pub fn run_exppair(a: &ExppairArgs, _g: &Globals) -> Result<CommandOutput, CliError> {
    let (word, pair, objective) = if a.search {
        let obj = Objective::parse(&a.objective)
            .ok_or_else(|| usage(format!("unknown objective `{}`", a.objective)))?;
        if a.max_len == 0 || a.max_len > 24 {
            return Err(usage("max-len must be in 1..=24"));
        }
        let (w, p) = exppair::search_words(a.max_len, obj);
        (w, p, Some(a.objective.clone()))
    } else {
        let text = a
            .word
            .as_deref()
            .ok_or_else(|| usage("give --word WORD or --search"))?;
        let w = PairWord::parse(text).map_err(|e| usage(e.to_string()))?;
        let p = exppair::eval_word(&w);
        (w, p, None)
    };
    let payload = ExppairPayload {
        word: word.to_string(),
        kappa: pair.kappa().to_string(),
        lambda: pair.lambda().to_string(),
        kappa_decimal: pair.kappa_f64(),
        lambda_decimal: pair.lambda_f64(),
        objective,
    };
    let mut csv = Csv::new("word,kappa,lambda,kappa_decimal,lambda_decimal");
    csv.row(&[
        payload.word.clone(),
        payload.kappa.clone(),
        payload.lambda.clone(),
        fmt_f64(payload.kappa_decimal),
        fmt_f64(payload.lambda_decimal),
    ]);
    let human = format!(
        "{}(0, 1) = ({}, {})  ~  ({:.6}, {:.6})",
        payload.word, payload.kappa, payload.lambda, payload.kappa_decimal, payload.lambda_decimal
    );
    ok(payload, csv, human)
}

pub fn run_vaaler(a: &VaalerArgs, _g: &Globals) -> Result<CommandOutput, CliError> {
    if a.h < 1 {
        return Err(usage("H must be at least 1"));
    }
    if a.grid < 10 {
        return Err(usage("grid must be at least 10"));
    }
    let v = vaaler::build_vaaler(a.h);
    let stats = vaaler::max_error_scan(&v, a.grid);
    let mut csv = Csv::new("h,grid_size,max_abs_error,mean_abs_error,max_violation,min_majorant");
    csv.row(&[
        stats.h.to_string(),
        stats.grid_size.to_string(),
        fmt_f64(stats.max_abs_error),
        fmt_f64(stats.mean_abs_error),
        fmt_f64(stats.max_violation),
        fmt_f64(stats.min_majorant),
    ]);
    let human = format!(
        "H = {}: max |psi - approx| = {:.6}, mean = {:.6}, max violation = {:.3e}, min majorant = {:.3e}",
        stats.h, stats.max_abs_error, stats.mean_abs_error, stats.max_violation, stats.min_majorant
    );
    ok(stats, csv, human)
}

#[derive(Serialize)]
struct BoundRows {
    rows: Vec<expsum::BoundReport>,
}

fn bound_csv(rows: &[expsum::BoundReport], param_names: &[&str]) -> Csv {
    let mut csv = Csv::new(&format!("{},measured,predicted,ratio", param_names.join(",")));
    for r in rows {
        let mut fields: Vec<String> = param_names
            .iter()
            .map(|k| {
                let v = &r.params[k];
                v.as_f64().map(fmt_f64).unwrap_or_else(|| v.to_string())
            })
            .collect();
        fields.push(fmt_f64(r.measured));
        fields.push(fmt_f64(r.predicted));
        fields.push(fmt_f64(r.ratio));
        csv.row(&fields);
    }
    csv
}

pub fn run_expsum_triple(a: &TripleArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let fs = parse_f64_list(&a.f).map_err(|e| usage(e.to_string()))?;
    let hs = parse_count_list(&a.h).map_err(|e| usage(e.to_string()))?;
    let ns = parse_count_list(&a.n).map_err(|e| usage(e.to_string()))?;
    let ms = parse_count_list(&a.m).map_err(|e| usage(e.to_string()))?;
    let alpha = parse_exponent(&a.alpha).map_err(|e| usage(e.to_string()))?;
    let beta = parse_exponent(&a.beta).map_err(|e| usage(e.to_string()))?;
    let gamma = parse_exponent(&a.gamma).map_err(|e| usage(e.to_string()))?;
    let mut rows = Vec::new();
    for &f in &fs {
        for &h in &hs {
            for &n in &ns {
                for &m in &ms {
                    let p = TripleParams { f, h, n, m, alpha, beta, gamma, eps: g.eps };
                    let r = expsum::triple_sum(&p).map_err(map_expsum_err)?;
                    rows.push(r);
                }
            }
        }
    }
    let csv = bound_csv(&rows, &["f", "h", "n", "m"]);
    let human = format!("{} grid points; worst ratio = {:.4}", rows.len(), worst_ratio(&rows));
    ok(BoundRows { rows }, csv, human)
}

fn worst_ratio(rows: &[expsum::BoundReport]) -> f64 {
    rows.iter().map(|r| r.ratio).fold(0.0, f64::max)
}

fn map_expsum_err(e: expsum::ExpSumError) -> CliError {
    match e {
        expsum::ExpSumError::SizeBudget(_) => CliError::Resource(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn parse_coeff(s: &str, seed: u64) -> Result<CoeffKind, CliError> {
    match s {
        "zero" => Ok(CoeffKind::Zero),
        "one" => Ok(CoeffKind::One),
        "mobius" => Ok(CoeffKind::Mobius),
        "random" => Ok(CoeffKind::RandomSign(seed)),
        _ => Err(usage(format!("unknown coefficient family `{}` (zero|one|mobius|random)", s))),
    }
}

pub fn run_expsum_bilinear(a: &BilinearArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let ratios = parse_f64_list(&a.f_ratio).map_err(|e| usage(e.to_string()))?;
    let ms = parse_count_list(&a.m).map_err(|e| usage(e.to_string()))?;
    let m1s = parse_count_list(&a.m1).map_err(|e| usage(e.to_string()))?;
    let m2s = parse_count_list(&a.m2).map_err(|e| usage(e.to_string()))?;
    let alpha = parse_exponent(&a.alpha).map_err(|e| usage(e.to_string()))?;
    let alpha1 = parse_exponent(&a.alpha1).map_err(|e| usage(e.to_string()))?;
    let alpha2 = parse_exponent(&a.alpha2).map_err(|e| usage(e.to_string()))?;
    let pair = exppair::eval_word(&PairWord::parse(&a.pair).map_err(|e| usage(e.to_string()))?);
    let coeff_a = parse_coeff(&a.coeff_a, g.seed)?;
    let coeff_b = parse_coeff(&a.coeff_b, g.seed.wrapping_add(1))?;

    // Mobius coefficients index up to max(2M, M1*M2)
    let needs_sieve = coeff_a == CoeffKind::Mobius || coeff_b == CoeffKind::Mobius;
    let sieve = if needs_sieve {
        let m_hi = ms.iter().max().unwrap() * 2;
        let b_hi = m1s.iter().max().unwrap() * m2s.iter().max().unwrap();
        Some(budgeted_sieve(m_hi.max(b_hi), g.mem_budget)?)
    } else {
        None
    };

    let mut rows = Vec::new();
    for &fr in &ratios {
        for &m in &ms {
            for &m1 in &m1s {
                for &m2 in &m2s {
                    let p = BilinearParams {
                        f: fr * (m1 * m2) as f64,
                        m,
                        m1,
                        m2,
                        alpha,
                        alpha1,
                        alpha2,
                        coeff_a,
                        coeff_b,
                    };
                    let r = expsum::bilinear_sum(&p, &pair, sieve.as_ref())
                        .map_err(map_expsum_err)?;
                    rows.push(r);
                }
            }
        }
    }
    let csv = bound_csv(&rows, &["f", "m", "m1", "m2"]);
    let human = format!(
        "{} grid points with pair ({}, {}); worst ratio = {:.4}",
        rows.len(),
        pair.kappa(),
        pair.lambda(),
        worst_ratio(&rows)
    );
    ok(BoundRows { rows }, csv, human)
}

pub fn run_expsum_prime(a: &PrimeArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let c = parse_c(&a.c, a.relaxed)?;
    let n = parse_count(&a.n).map_err(|e| usage(e.to_string()))?;
    let n1 = match &a.n1 {
        Some(s) => parse_count(s).map_err(|e| usage(e.to_string()))?,
        None => 2 * n,
    };
    let x = match &a.x {
        Some(s) => parse_count(s).map_err(|e| usage(e.to_string()))? as f64,
        None => n as f64,
    };
    if n < 2 {
        return Err(usage("N must be at least 2"));
    }
    let s = budgeted_sieve(n1, g.mem_budget)?;
    let r = expsum::prime_expsum_aggregate(&c, a.d, n, n1, x, g.eps, &s)
        .map_err(map_expsum_err)?;
    let mut csv = Csv::new("c,d,n,n1,x,eps,h_max,total,ratio_vs_predicted");
    csv.row(&[
        r.c.clone(),
        r.d.to_string(),
        r.n_lo.to_string(),
        r.n_hi.to_string(),
        fmt_f64(r.x),
        fmt_f64(r.eps),
        r.h_max.to_string(),
        fmt_f64(r.total),
        fmt_f64(r.ratio_vs_predicted),
    ]);
    let human = format!(
        "sum over h <= {} of |sum Lambda(n) e(h n^gamma / {}^2)| on ({}, {}] = {:.3}  (ratio vs x^(1-eps) N^(1-gamma): {:.4})",
        r.h_max, r.d, r.n_lo, r.n_hi, r.total, r.ratio_vs_predicted
    );
    ok(r, csv, human)
}

#[derive(Serialize)]
struct HbCheckPayload {
    k: u32,
    z_cut: u64,
    n_max: u64,
    tolerance: f64,
    max_rel_error: f64,
    ok: bool,
}

pub fn run_hb_check(a: &HbCheckArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let n_max = parse_count(&a.n_max).map_err(|e| usage(e.to_string()))?;
    if n_max < 2 {
        return Err(usage("n-max must be at least 2"));
    }
    let z_cut = (n_max as f64).powf(1.0 / a.k as f64).ceil() as u64;
    let params = HBParams::new(a.k, z_cut).map_err(|e| usage(e.to_string()))?;
    let s = budgeted_sieve(n_max, g.mem_budget)?;
    let mut max_rel = 0.0f64;
    for n in 1..=n_max {
        let got = hbdecomp::hb_lambda(n, &params, &s).map_err(|e| usage(e.to_string()))?;
        let want = sieve::lambda(n, &s);
        let rel = (got - want).abs() / want.abs().max(1.0);
        max_rel = max_rel.max(rel);
    }
    let tolerance = 1e-9;
    let payload = HbCheckPayload {
        k: a.k,
        z_cut,
        n_max,
        tolerance,
        max_rel_error: max_rel,
        ok: max_rel <= tolerance,
    };
    let mut csv = Csv::new("k,z_cut,n_max,max_rel_error,ok");
    csv.row(&[
        a.k.to_string(),
        z_cut.to_string(),
        n_max.to_string(),
        fmt_f64(max_rel),
        payload.ok.to_string(),
    ]);
    let human = format!(
        "identity vs Lambda(n) for n <= {}, k = {}, z = {}: max relative error {:.3e} ({})",
        n_max,
        a.k,
        z_cut,
        max_rel,
        if payload.ok { "OK" } else { "VIOLATED" }
    );
    ok(payload, csv, human)
}

#[derive(Serialize)]
struct HbWindowPayload {
    x: f64,
    c: String,
    eps: f64,
    n: f64,
    h1: f64,
    d: u64,
    u: f64,
    v: f64,
    z: f64,
    report: hbdecomp::WindowReport,
}

pub fn run_hb_window(a: &HbWindowArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let c = parse_c(&a.c, a.relaxed)?;
    let x = parse_count(&a.x).map_err(|e| usage(e.to_string()))? as f64;
    let n = match &a.n {
        Some(s) => parse_count(s).map_err(|e| usage(e.to_string()))? as f64,
        None => x,
    };
    if a.h1 <= 0.0 {
        return Err(usage("h1 must be positive"));
    }
    let (u, v, z) = hbdecomp::window_choices(x, c.gamma_f64(), g.eps, n, a.h1);
    let report = hbdecomp::check_decomposition_window(n, 2.0 * n, u, v, z);
    let mut csv = Csv::new("condition,lhs,rhs,holds");
    for cond in &report.conditions {
        csv.row(&[
            format!("\"{}\"", cond.name),
            fmt_f64(cond.lhs),
            fmt_f64(cond.rhs),
            cond.holds.to_string(),
        ]);
    }
    let human = report
        .conditions
        .iter()
        .map(|c| format!("{:<18} {}  ({:.4e} vs {:.4e})", c.name, if c.holds { "holds" } else { "FAILS" }, c.lhs, c.rhs))
        .collect::<Vec<_>>()
        .join("\n");
    let payload = HbWindowPayload {
        x,
        c: c.to_string(),
        eps: g.eps,
        n,
        h1: a.h1,
        d: a.d,
        u,
        v,
        z,
        report,
    };
    ok(payload, csv, human)
}

#[derive(Serialize)]
struct SieveDumpPayload {
    lo: u64,
    hi: u64,
    path: String,
    bytes_written: u64,
    verified: bool,
}

pub fn run_sieve_dump(a: &SieveDumpArgs, g: &Globals) -> Result<CommandOutput, CliError> {
    let lo = parse_count(&a.lo).map_err(|e| usage(e.to_string()))?;
    let hi = parse_count(&a.hi).map_err(|e| usage(e.to_string()))?;
    if lo < 1 || lo > hi {
        return Err(usage(format!("need 1 <= lo <= hi, got [{}, {}]", lo, hi)));
    }
    let len = hi - lo + 1;
    // table + residue scratch, roughly 17 bytes per entry
    if len.saturating_mul(17) > g.mem_budget {
        return Err(CliError::Resource(format!(
            "segment of {} entries exceeds the memory budget",
            len
        )));
    }
    let base = sieve::base_primes(hi.isqrt() + 1);
    let table = sieve::sieve_segment_with_max(lo, hi, &base, len)
        .map_err(|e| CliError::Resource(e.to_string()))?;
    let mut file = std::fs::File::create(&a.out)
        .map_err(|e| CliError::Resource(format!("cannot create {}: {}", a.out.display(), e)))?;
    sieve::dump_table(&table, &mut file).map_err(|e| CliError::Resource(e.to_string()))?;
    let bytes = std::fs::metadata(&a.out).map(|m| m.len()).unwrap_or(0);
    let verified = if a.verify {
        let mut f = std::fs::File::open(&a.out)
            .map_err(|e| CliError::Resource(e.to_string()))?;
        let back = sieve::load_table(&mut f).map_err(|e| CliError::Resource(e.to_string()))?;
        back == table
    } else {
        false
    };
    if a.verify && !verified {
        return Err(CliError::Resource("dump verification failed".into()));
    }
    let payload = SieveDumpPayload {
        lo,
        hi,
        path: a.out.display().to_string(),
        bytes_written: bytes,
        verified,
    };
    let mut csv = Csv::new("lo,hi,path,bytes_written,verified");
    csv.row(&[
        lo.to_string(),
        hi.to_string(),
        payload.path.clone(),
        bytes.to_string(),
        verified.to_string(),
    ]);
    let human = format!(
        "wrote sieve table [{}, {}] to {} ({} bytes{})",
        lo,
        hi,
        payload.path,
        bytes,
        if verified { ", verified" } else { "" }
    );
    ok(payload, csv, human)
}
