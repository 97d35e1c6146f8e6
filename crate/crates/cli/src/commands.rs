use num_bigint::BigUint;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};
use visidense::census::ratio;
use visidense::freegrp::{annular_estimate, STATE_BUDGET};
use visidense::lattice::{
    ball_count, even_visible_count, even_visible_count_mobius, measure_count, parity_census_mobius, Norm, OmegaSpec,
    VisibilityClass,
};
use visidense::numtheory::zeta;
use visidense::ratios::{
    beta_limits, equation_ratio_bounds, mapping_ratio_bounds_lattice, mapping_ratio_lattice, spherical_bound_limits,
    spherical_mapping_bounds, verdict_counts, MappingBounds,
};
use visidense::registry::{EngineOptions, Registry};
use visidense::surfgrp::SurfaceGroup;
use visidense::words::{GroupWord, Letter};
use visidense::{Error, GroupId, Result, SphereCensus};

use crate::report::{Report, Row};
use crate::{Cli, Command, EquationArgs, FreeArgs, LatticeArgs, LimitArgs, RatioArgs, RatioMode, SurfaceArgs, Target};

pub fn run(cli: &Cli) -> Result<Report> {
    let registry = Registry::default();
    match &cli.command {
        Command::Lattice(a) => lattice(&registry, a),
        Command::Free(a) => free(&registry, a),
        Command::Surface(a) => surface(&registry, a, cli.seed),
        Command::Ratio(a) => ratio_cmd(&registry, a),
        Command::Equations(a) => equations(&registry, a),
        Command::Limits(a) => limits(a),
        Command::Methods => Ok(methods(&registry)),
    }
}

fn big_ratio(a: &BigUint, b: &BigUint) -> f64 {
    ratio(a, b)
}

fn census_rows(censuses: &[SphereCensus], abelian_rank: usize) -> Result<Vec<Row>> {
    let beta = beta_limits(abelian_rank as u32).ok();
    censuses
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let annular = if i > 0 { Some(annular_estimate(&censuses[i - 1], c)?) } else { None };
            Ok(Row {
                n: c.n as u64,
                sphere_or_ball_size: c.total.to_string(),
                visible_count: c.visible_count().to_string(),
                fraction: c.visible_fraction(),
                annular_estimate: annular,
                theoretical_even: beta.map(|b| b.even),
                theoretical_odd: beta.map(|b| b.odd),
                theoretical_annular: beta.map(|b| b.annular),
            })
        })
        .collect()
}

fn lattice(registry: &Registry, a: &LatticeArgs) -> Result<Report> {
    let mut params = Map::new();
    params.insert("rank".into(), json!(a.rank));
    params.insert("norm".into(), json!(a.norm.name()));
    params.insert("t_visible".into(), json!(a.t_visible));
    if let (Some(text), Some(scale)) = (&a.omega, a.scale) {
        params.insert("omega".into(), json!(text));
        params.insert("scale".into(), json!(scale.to_string()));
        return lattice_measure(a, text, scale, params);
    }
    params.insert("radius".into(), json!(a.radius));
    params.insert("parity".into(), json!(a.parity));
    let method = a.method.clone().unwrap_or_else(|| if a.norm == Norm::L2 { "brute" } else { "mobius" }.to_string());
    params.insert("method".into(), json!(method));
    let counter = registry.counter(&method)?;
    if a.parity && a.t_visible != 1 {
        return Err(Error::Argument("--parity counts visible points; drop --t-visible".into()));
    }
    let from = a.from.unwrap_or(a.radius);
    if from > a.radius {
        return Err(Error::Argument("--from exceeds --radius".into()));
    }
    params.insert("from".into(), json!(from));
    let z = zeta(a.rank as u32, 1e-12)?;
    let r = a.rank as i32;
    let mut rows = Vec::new();
    for n in from..=a.radius {
        let size = ball_count(a.rank, a.norm, n)?;
        let row = if a.parity {
            let even: BigUint = match method.as_str() {
                "mobius" => even_visible_count_mobius(a.rank, a.norm, n)?
                    .to_biguint()
                    .ok_or_else(|| Error::Argument("negative count".into()))?,
                _ => BigUint::from(even_visible_count(a.rank, a.norm, n)?),
            };
            let k = f64::from(r);
            Row {
                n,
                fraction: big_ratio(&even, &size),
                sphere_or_ball_size: size.to_string(),
                visible_count: even.to_string(),
                annular_estimate: None,
                theoretical_even: Some((2f64.powf(k - 1.0) - 1.0) / ((2f64.powf(k) - 1.0) * z)),
                theoretical_odd: None,
                theoretical_annular: None,
            }
        } else {
            let count = counter.count(a.rank, a.norm, n, a.t_visible)?;
            Row {
                n,
                fraction: big_ratio(&count, &size),
                sphere_or_ball_size: size.to_string(),
                visible_count: count.to_string(),
                annular_estimate: None,
                theoretical_even: None,
                theoretical_odd: None,
                theoretical_annular: Some(1.0 / ((a.t_visible as f64).powi(r) * z)),
            }
        };
        rows.push(row);
    }
    let mut summary = Map::new();
    if a.parity {
        let p = parity_census_mobius(a.rank, a.radius)?;
        summary.insert("orthant_parity_table".into(), json!(p.table));
        summary.insert("orthant_even_visible".into(), json!(p.u1ev));
        summary.insert("max_pattern_deviation".into(), json!(p.max_pattern_deviation()));
    }
    Ok(Report::new("lattice", Value::Object(params), rows, Value::Object(summary)))
}

fn lattice_measure(a: &LatticeArgs, text: &str, scale: Rational64, params: Map<String, Value>) -> Result<Report> {
    let omega: OmegaSpec = text.parse()?;
    let class = VisibilityClass::t_visible(a.t_visible)?;
    let count = measure_count(class, &omega, a.rank, scale)?;
    let t = *scale.numer() as f64 / *scale.denom() as f64;
    let measure = count as f64 / t.powi(a.rank as i32);
    let z = zeta(a.rank as u32, 1e-12)?;
    let limit = omega.volume() / ((a.t_visible as f64).powi(a.rank as i32) * z);
    let summary = json!({
        "count": count.to_string(),
        "measure": measure,
        "volume": omega.volume(),
        "theoretical_measure": limit,
    });
    Ok(Report::new("lattice", Value::Object(params), Vec::new(), summary))
}

fn default_free_max_n(rank: usize) -> usize {
    if rank <= 2 {
        return 60;
    }
    let fits = |n: usize| (2 * n as u128 + 1).pow(rank as u32) * 2 * rank as u128 <= STATE_BUDGET;
    (0..=60).take_while(|&n| fits(n)).last().unwrap_or(0)
}

fn free(registry: &Registry, a: &FreeArgs) -> Result<Report> {
    let group = GroupId::Free { rank: a.rank };
    let n_max = a.max_n.unwrap_or_else(|| default_free_max_n(a.rank));
    let method = a.method.clone().unwrap_or_else(|| Registry::default_engine(group).to_string());
    let censuses = registry.census(Some(&method), group, n_max, &EngineOptions::default())?;
    let params = json!({ "rank": a.rank, "max_n": n_max, "method": method });
    let rows = census_rows(&censuses, a.rank)?;
    Ok(Report::new("free", params, rows, json!({ "group": group.to_string() })))
}

fn surface(registry: &Registry, a: &SurfaceArgs, seed: u64) -> Result<Report> {
    let group = GroupId::Surface { genus: a.genus };
    let method = a.method.clone().unwrap_or_else(|| Registry::default_engine(group).to_string());
    let opts = EngineOptions { checkpoint: a.checkpoint.clone(), memory_budget: a.memory_mib << 20 };
    let censuses = registry.census(Some(&method), group, a.max_n, &opts)?;
    let mut params = json!({ "genus": a.genus, "max_n": a.max_n, "method": method, "memory_mib": a.memory_mib });
    if let Some(p) = &a.checkpoint {
        params["checkpoint"] = json!(p.display().to_string());
    }
    let mut summary = json!({ "group": group.to_string() });
    if a.verify_samples > 0 {
        params["verify_samples"] = json!(a.verify_samples);
        params["seed"] = json!(seed);
        summary["verification"] = verify_normal_forms(a.genus, a.verify_samples, seed)?;
    }
    let rows = census_rows(&censuses, 2 * a.genus)?;
    Ok(Report::new("surface", params, rows, summary))
}

/// Random words checked against Dehn's algorithm: the normal form is equal to
/// the input, no longer, and a fixpoint.
fn verify_normal_forms(genus: usize, samples: usize, seed: u64) -> Result<Value> {
    let g = SurfaceGroup::new(genus)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = (4 * genus) as u8;
    let mut failures = 0usize;
    for _ in 0..samples {
        let len = rng.gen_range(0..=12);
        let w = GroupWord((0..len).map(|_| Letter::from_code(rng.gen_range(0..letters))).collect());
        let nf = g.normalize(&w);
        if !(g.equal(&w, nf.word()) && nf.len() <= w.len() && g.normalize(nf.word()) == nf) {
            failures += 1;
        }
    }
    Ok(json!({ "samples": samples, "failures": failures }))
}

fn bounds_json(b: &MappingBounds) -> Value {
    let (lo, hi) = b.to_f64();
    json!({
        "lower": lo,
        "upper": hi,
        "lower_exact": b.lower.to_string(),
        "upper_exact": b.upper.to_string(),
    })
}

fn sphere_at(registry: &Registry, group: GroupId, n: u64) -> Result<SphereCensus> {
    let mut c = registry.census(None, group, n as usize, &EngineOptions::default())?;
    Ok(c.pop().expect("censuses start at n = 0"))
}

fn ratio_cmd(registry: &Registry, a: &RatioArgs) -> Result<Report> {
    match a.mode {
        RatioMode::Lattice => {
            let e = mapping_ratio_lattice(a.rank_n, a.rank_k, a.norm, a.s, a.t)?;
            let mut summary = json!({
                "exact": e.to_string(),
                "value": ratio(e.numer().magnitude(), e.denom().magnitude()),
            });
            if let Ok((lo, hi)) = mapping_ratio_bounds_lattice(a.rank_n as u32, a.rank_k as u32) {
                summary["limit_lower"] = json!(lo);
                summary["limit_upper"] = json!(hi);
            }
            let params = json!({
                "mode": "lattice", "s": a.s, "t": a.t,
                "rank_n": a.rank_n, "rank_k": a.rank_k, "norm": a.norm.name(),
            });
            Ok(Report::new("ratio", params, Vec::new(), summary))
        }
        RatioMode::Sphere => {
            let source = a.genus_n.map_or(GroupId::Free { rank: a.rank_n }, |g| GroupId::Surface { genus: g });
            let target = a.genus_k.map_or(GroupId::Free { rank: a.rank_k }, |g| GroupId::Surface { genus: g });
            let f = sphere_at(registry, source, a.s)?;
            let g = sphere_at(registry, target, a.t)?;
            let b = spherical_mapping_bounds(&f, &g);
            let mut summary = bounds_json(&b);
            summary["source"] = json!(source.to_string());
            summary["target"] = json!(target.to_string());
            if let Ok((lo, hi)) = spherical_bound_limits(
                source.abelian_rank() as u32,
                a.s as usize % 2,
                target.abelian_rank() as u32,
                a.t as usize % 2,
            ) {
                summary["limit_lower"] = json!(lo);
                summary["limit_upper"] = json!(hi);
            }
            let params = json!({
                "mode": "sphere", "s": a.s, "t": a.t,
                "source": source.to_string(), "target": target.to_string(),
            });
            Ok(Report::new("ratio", params, Vec::new(), summary))
        }
    }
}

fn equations(registry: &Registry, a: &EquationArgs) -> Result<Report> {
    let target = match a.target {
        Target::Free => GroupId::Free { rank: a.rank },
        Target::Surface => GroupId::Surface { genus: a.genus },
    };
    let z = sphere_at(registry, GroupId::Free { rank: a.vars }, a.s)?;
    let w = sphere_at(registry, target, a.t)?;
    let b = equation_ratio_bounds(&z, &w)?;
    let mut summary = bounds_json(&b);
    let counts = verdict_counts(&z, &w);
    let pairs = &z.total * &w.total;
    let mut verdicts = Map::new();
    for (v, c) in &counts {
        verdicts.insert(v.to_string(), json!({ "count": c.to_string(), "fraction": big_ratio(c, &pairs) }));
    }
    summary["verdicts"] = Value::Object(verdicts);
    summary["pairs"] = json!(pairs.to_string());
    if let Ok((lo, hi)) =
        spherical_bound_limits(a.vars as u32, a.s as usize % 2, target.abelian_rank() as u32, a.t as usize % 2)
    {
        summary["limit_lower"] = json!(lo);
        summary["limit_upper"] = json!(hi);
    }
    let params = json!({ "vars": a.vars, "s": a.s, "t": a.t, "target": target.to_string() });
    Ok(Report::new("equations", params, Vec::new(), summary))
}

fn limits(a: &LimitArgs) -> Result<Report> {
    let b = beta_limits(a.rank)?;
    let (lo, hi) = mapping_ratio_bounds_lattice(a.rank, a.rank)?;
    let summary = json!({
        "r": a.rank,
        "zeta": zeta(a.rank, 1e-12)?,
        "even": b.even,
        "odd": b.odd,
        "annular": b.annular,
        "lattice_mapping_lower": lo,
        "lattice_mapping_upper": hi,
    });
    Ok(Report::new("limits", json!({ "rank": a.rank }), Vec::new(), summary))
}

fn methods(registry: &Registry) -> Report {
    let counters: Map<String, Value> = registry
        .counter_names()
        .into_iter()
        .map(|n| (n.to_string(), json!(registry.counter(n).map(|c| c.description()).unwrap_or_default())))
        .collect();
    let engines: Map<String, Value> = registry
        .engine_names()
        .into_iter()
        .map(|n| (n.to_string(), json!(registry.engine(n).map(|e| e.description()).unwrap_or_default())))
        .collect();
    Report::new("methods", json!({}), Vec::new(), json!({ "counters": counters, "engines": engines }))
}
