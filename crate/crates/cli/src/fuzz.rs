use crate::{Finished, Outcome};
use clap::Args;
use covdex::decompose::hypotheses_hold;
use covdex::density::{bound_from, codensity_within, DEFAULT_ENUMERATION_CAP};
use covdex::oracle::{
    brute_codensity, brute_cover_index, random_multigraph, random_tight_multigraph, verify_decomposition, FuzzConfig,
};
use covdex::{decompose, DecomposeOptions};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Args, Clone, Serialize)]
pub struct FuzzArgs {
    /// Largest vertex count.
    #[arg(long, default_value_t = 6)]
    n: usize,
    /// Smallest vertex count; instances cycle through `n_min..=n`.
    #[arg(long)]
    n_min: Option<usize>,
    #[arg(long, default_value_t = 2)]
    max_mult: usize,
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Base seed; instance `i` uses `seed + i`. Overridden by COVDEX_SEED.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.6)]
    edge_probability: f64,
    /// Build instances from tight odd gadgets instead of random pairs.
    #[arg(long)]
    tight: bool,
    /// Largest edge count for the exact cover-index check.
    #[arg(long, default_value_t = 14)]
    xi_cap: usize,
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: usize,
    /// Worker threads; results are merged by instance index.
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    jobs: usize,
}

impl FuzzArgs {
    pub fn parameters(&self, seed: u64) -> Value {
        let mut v = json!(self);
        v["seed"] = json!(seed);
        v
    }
}

#[derive(Debug, Clone, Serialize)]
struct Finding {
    index: u64,
    seed: u64,
    kind: &'static str,
    message: String,
}

#[derive(Debug, Default)]
struct InstanceResult {
    generated: bool,
    hypotheses: bool,
    decomposed: bool,
    sandwich_checked: bool,
    sandwich_ok: bool,
    resource_limited: bool,
    findings: Vec<Finding>,
}

fn instance(args: &FuzzArgs, index: u64, seed: u64, timings: bool) -> InstanceResult {
    let mut out = InstanceResult::default();
    let n_min = args.n_min.unwrap_or(args.n).min(args.n);
    let n = n_min + (index % (args.n - n_min + 1) as u64) as usize;
    let g = if args.tight {
        match random_tight_multigraph(seed, args.max_mult) {
            Some(g) => g,
            None => return out,
        }
    } else {
        let mut cfg = FuzzConfig::new(n, args.max_mult, seed);
        cfg.edge_probability = args.edge_probability;
        random_multigraph(&cfg)
    };
    out.generated = true;
    let finding = |kind: &'static str, message: String| Finding {
        index,
        seed,
        kind,
        message,
    };
    let within: Vec<_> = g.vertices().collect();
    let rho = match codensity_within(&g, &within, args.cap) {
        Ok((rho, _)) => rho,
        Err(_) => {
            out.resource_limited = true;
            return out;
        }
    };
    if let Ok(brute) = brute_codensity(&g) {
        if brute != rho {
            out.findings.push(finding("anomaly", format!("co-density {rho} but brute force gives {brute}")));
        }
    }
    let delta = g.min_degree();
    let k = bound_from(delta, rho);
    out.hypotheses = hypotheses_hold(&g, k);
    let options = DecomposeOptions {
        enumeration_cap: args.cap,
        timings,
        ..DecomposeOptions::default()
    };
    match decompose(&g, options) {
        Ok(d) => match verify_decomposition(&g, &d.covers) {
            Ok(()) if d.covers.len() == k => out.decomposed = true,
            Ok(()) => out.findings.push(finding("anomaly", format!("{} covers for k = {k}", d.covers.len()))),
            Err(e) => out.findings.push(finding("anomaly", e.to_string())),
        },
        Err(report) if report.resource_limit => out.resource_limited = true,
        Err(report) => {
            let kind = if report.hypotheses_held { "anomaly" } else { "candidate" };
            out.findings.push(finding(kind, format!("{}: {}", report.stage, report.message)));
        }
    }
    if delta >= 1 && g.edge_count() <= args.xi_cap {
        if let Ok(xi) = brute_cover_index(&g, args.xi_cap) {
            out.sandwich_checked = true;
            let upper = rho.floor().map_or(delta, |f| delta.min(f as usize));
            if xi > upper {
                out.findings.push(finding("anomaly", format!("cover index {xi} above upper bound {upper}")));
            } else if xi < k {
                let kind = if out.hypotheses { "anomaly" } else { "candidate" };
                out.findings.push(finding(kind, format!("cover index {xi} below k = {k}")));
            } else {
                out.sandwich_ok = true;
            }
        }
    }
    out
}

pub fn run(args: &FuzzArgs, seed: u64, timings: bool) -> Finished {
    if args.n == 0 {
        return Finished::error(Outcome::Usage, "usage", "--n must be positive");
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => return Finished::error(Outcome::Usage, "usage", e),
    };
    let results: Vec<InstanceResult> = pool.install(|| {
        (0..args.count)
            .into_par_iter()
            .map(|i| instance(args, i, seed.wrapping_add(i), timings))
            .collect()
    });
    let count = |f: fn(&InstanceResult) -> bool| results.iter().filter(|r| f(r)).count();
    let findings: Vec<&Finding> = results.iter().flat_map(|r| &r.findings).collect();
    let anomalies = findings.iter().filter(|f| f.kind == "anomaly").count();
    let candidates = findings.iter().filter(|f| f.kind == "candidate").count();
    let payload = json!({
        "instances": count(|r| r.generated),
        "hypothesis_held": count(|r| r.generated && r.hypotheses),
        "decompose_ok": count(|r| r.decomposed),
        "sandwich_checked": count(|r| r.sandwich_checked),
        "sandwich_ok": count(|r| r.sandwich_ok),
        "resource_limited": count(|r| r.resource_limited),
        "anomalies": anomalies,
        "candidates": candidates,
        "findings": findings,
    });
    let outcome = if anomalies > 0 {
        Outcome::VerificationFailed
    } else if candidates > 0 {
        Outcome::Candidate
    } else {
        Outcome::Ok
    };
    Finished { outcome, payload }
}
