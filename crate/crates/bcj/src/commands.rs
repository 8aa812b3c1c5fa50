//! Subcommand implementations. Each returns a rendered report and an exit code.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use bcj_core::bcjmap::{sigma_bp, sigma_separating};
use bcj_core::cassonmorita::{epsilon, mu, rho_separating, CheckOutcome, LinkingMatrix};
use bcj_core::surface::{Genus, MAX_GENUS};
use bcj_core::wedgespan::{
    dim_im_cubic_coefficient, dims, image_rank_report, orbit_classes, Disjointness, ImageReport,
    OrbitLabel, SearchConfig,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_OK};
use crate::formats::{BoolPolyJson, CMPolyJson, Catalog, LinkingMatrixJson, ResolvedEntry, SCHEMA_VERSION};
use crate::verify::verify_genus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Md,
}

/// An inclusive genus range, written `4` or `1..4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenusRange {
    pub lo: u32,
    pub hi: u32,
}

impl std::str::FromStr for GenusRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| format!("bad genus {t:?}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo == 0 || lo > hi || hi > MAX_GENUS {
            return Err(format!("genus range {s:?} must satisfy 1 <= lo <= hi <= {MAX_GENUS}"));
        }
        Ok(GenusRange { lo, hi })
    }
}

impl GenusRange {
    pub fn genera(&self) -> impl Iterator<Item = Genus> {
        (self.lo..=self.hi).map(|g| Genus::new(g).expect("validated range"))
    }
}

/// Everything that determines a run's mathematical output. The output path
/// is left out so that the same run written to two places hashes the same.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub genus: GenusRange,
    pub max_support: usize,
    pub include_families: bool,
    pub include_bp: bool,
    pub disjointness: String,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    pub format: Format,
    pub exhaustive_mu: bool,
    pub linking_matrix: Option<PathBuf>,
    pub input: Option<PathBuf>,
}

/// What a command produced.
pub struct Outcome {
    pub report: Value,
    pub text: String,
    /// Human-readable summary for stderr.
    pub summary: String,
    pub exit: i32,
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn envelope(
    kind: &str,
    cfg: &RunConfig,
    hashes: &BTreeMap<String, String>,
    results: Value,
    passed: bool,
    elapsed: Value,
) -> Value {
    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    // everything but "timing" is a function of the config and input bytes
    json!({
        "kind": kind,
        "manifest": {
            "tool": "bcj",
            "version": env!("CARGO_PKG_VERSION"),
            "schema_version": SCHEMA_VERSION,
            "config": cfg,
            "input_sha256": hashes,
        },
        "passed": passed,
        "results": results,
        "timing": { "unix_time": unix, "elapsed_ms": elapsed },
    })
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf8 fields")
}

fn md_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for r in rows {
        s.push_str(&format!("| {} |\n", r.join(" | ")));
    }
    s
}

fn render(cfg: &RunConfig, report: &Value, header: &[&str], rows: &[Vec<String>]) -> String {
    match cfg.format {
        Format::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
        Format::Csv => csv_string(header, rows),
        Format::Md => md_table(header, rows),
    }
}

fn exit_for(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

pub fn cmd_dims(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = Instant::now();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut summary = String::new();
    for g in cfg.genus.genera() {
        let d = dims(g);
        let cubic = if g.get() + 3 <= MAX_GENUS {
            Some(dim_im_cubic_coefficient(g.get())?)
        } else {
            None
        };
        results.push(json!({
            "genus": d.genus,
            "d": d.d,
            "dim_wedge": d.dim_wedge,
            "dim_w": d.dim_w,
            "dim_im": d.dim_im,
            "cubic_type": d.cubic_type,
            "dim_im_minus_cubic_type": d.dim_im as i64 - d.cubic_type,
            "dim_im_cubic_coefficient": cubic,
        }));
        rows.push(vec![
            d.genus.to_string(),
            d.d.to_string(),
            d.dim_wedge.to_string(),
            d.dim_w.to_string(),
            d.dim_im.to_string(),
        ]);
        summary.push_str(&format!(
            "g={}: d={} dim_wedge={} dim_w={} dim_im={}\n",
            d.genus, d.d, d.dim_wedge, d.dim_w, d.dim_im
        ));
    }
    let report = envelope("dims", cfg, &BTreeMap::new(), Value::Array(results), true, json!(ms(t)));
    let text = render(cfg, &report, &["g", "d", "dim_wedge", "dim_w", "dim_im"], &rows);
    Ok(Outcome { report, text, summary, exit: EXIT_OK })
}

pub fn cmd_orbits(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let t = Instant::now();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut summary = String::new();
    let mut passed = true;
    for g in cfg.genus.genera() {
        if g.get() < 2 {
            return Err(CliError::Usage("orbits needs g >= 2".into()));
        }
        let rep = orbit_classes(g)?;
        passed &= rep.errors.is_empty();
        let mut classes = Vec::new();
        for c in &rep.classes {
            let (m1, m2) = c.representative;
            let repr = format!("{} ^ {}", m1.render(g), m2.render(g));
            let label = c.label.map(|l| l.name().to_string());
            rows.push(vec![
                g.get().to_string(),
                label.clone().unwrap_or_else(|| "?".into()),
                c.members.len().to_string(),
                repr.clone(),
            ]);
            classes.push(json!({
                "label": label,
                "size": c.members.len(),
                "representative": repr,
                "slots": c.members,
            }));
        }
        summary.push_str(&format!(
            "g={g}: {} classes, {} errors\n",
            rep.classes.len(),
            rep.errors.len()
        ));
        results.push(json!({
            "genus": g.get(),
            "class_count": rep.classes.len(),
            "classes": classes,
            "errors": rep.errors,
        }));
    }
    let report = envelope("orbits", cfg, &BTreeMap::new(), Value::Array(results), passed, json!(ms(t)));
    let text = render(cfg, &report, &["g", "class", "size", "representative"], &rows);
    Ok(Outcome { report, text, summary, exit: exit_for(passed) })
}

fn search_json(r: &ImageReport, g: Genus) -> Value {
    let hits: BTreeMap<&str, Option<&String>> = r
        .orbit_hits
        .iter()
        .map(|(l, h)| (l.name(), h.as_ref()))
        .collect();
    let missing: Vec<[String; 2]> = r
        .missing
        .iter()
        .map(|(a, b)| [a.render(g), b.render(g)])
        .collect();
    json!({
        "genus": r.genus,
        "parameters": {
            "max_support": r.config.max_support,
            "include_families": r.config.include_families,
            "include_bp": r.config.include_bp,
            "disjointness": r.config.disjointness.name(),
        },
        "rank": r.rank,
        "dims": {
            "d": r.dims.d,
            "dim_wedge": r.dims.dim_wedge,
            "dim_w": r.dims.dim_w,
            "dim_im": r.dims.dim_im,
        },
        "codim": r.codim,
        "covers_w": r.covers_w(),
        "missing": missing,
        "orbit_hits": hits,
        "descriptors": { "enumerated": r.descriptors_raw, "distinct": r.descriptors_distinct },
        "cycles_examined": r.cycles_examined,
        "family_elements": r.family_elements,
    })
}

pub fn parse_disjointness(s: &str) -> Result<Disjointness, CliError> {
    match s {
        "orthogonal" => Ok(Disjointness::Orthogonal),
        "support" => Ok(Disjointness::Support),
        other => Err(CliError::Usage(format!("unknown disjointness {other:?}"))),
    }
}

pub fn cmd_search(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.max_support == 0 {
        return Err(CliError::Usage("--max-support must be at least 1".into()));
    }
    let mode = parse_disjointness(&cfg.disjointness)?;
    if cfg.genus.lo < 2 {
        return Err(CliError::Usage("search needs g >= 2".into()));
    }
    let mut results = Vec::new();
    let mut elapsed = BTreeMap::new();
    let mut rows = Vec::new();
    let mut md = String::new();
    let mut summary = String::new();
    let mut passed = true;
    for g in cfg.genus.genera() {
        let t = Instant::now();
        let sc = SearchConfig::new(cfg.max_support)
            .families(cfg.include_families)
            .bp(cfg.include_bp)
            .disjointness(mode);
        let r = image_rank_report(g, sc)?;
        elapsed.insert(g.get().to_string(), ms(t));
        passed &= r.covers_w();
        rows.push(vec![
            g.get().to_string(),
            r.rank.to_string(),
            r.dims.dim_w.to_string(),
            r.dims.dim_im.to_string(),
            r.codim.to_string(),
            r.missing.len().to_string(),
        ]);
        let line = format!(
            "g={g}: rank {} (dim W {}, dim IM {}, codim {}), {} of W missing",
            r.rank,
            r.dims.dim_w,
            r.dims.dim_im,
            r.codim,
            r.missing.len()
        );
        summary.push_str(&line);
        summary.push('\n');
        md.push_str(&format!("## g = {g}\n\n{line}\n\n"));
        let hit_rows: Vec<Vec<String>> = OrbitLabel::ALL
            .iter()
            .filter_map(|l| r.orbit_hits.iter().find(|(x, _)| x == l))
            .map(|(l, h)| {
                vec![
                    l.name().to_string(),
                    h.clone().unwrap_or_else(|| "(not reached)".into()),
                ]
            })
            .collect();
        md.push_str(&md_table(&["orbit", "first witnessing cycle"], &hit_rows));
        md.push('\n');
        results.push(search_json(&r, g));
    }
    let report = envelope("search", cfg, &BTreeMap::new(), Value::Array(results), passed, json!(elapsed));
    let text = match cfg.format {
        Format::Md => md,
        _ => render(cfg, &report, &["g", "rank", "dim_w", "dim_im", "codim", "missing"], &rows),
    };
    Ok(Outcome { report, text, summary, exit: exit_for(passed) })
}

fn load_linking_matrix(path: &Path, hashes: &mut BTreeMap<String, String>) -> Result<LinkingMatrix, CliError> {
    let bytes = read(path)?;
    hashes.insert(path.display().to_string(), sha256_hex(&bytes));
    let j: LinkingMatrixJson = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, e)))?;
    j.to_matrix()
}

fn check_json(c: &CheckOutcome) -> Value {
    json!({
        "name": c.name,
        "trials": c.trials,
        "failures": c.failures,
        "passed": c.passed(),
        "witnesses": c.witnesses,
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut hashes = BTreeMap::new();
    let supplied = match &cfg.linking_matrix {
        Some(p) => Some(load_linking_matrix(p, &mut hashes)?),
        None => None,
    };
    if cfg.exhaustive_mu && cfg.genus.hi > 10 {
        return Err(CliError::Usage(format!(
            "--exhaustive-mu is limited to g <= 10, got {}",
            cfg.genus.hi
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut summary = String::new();
    let mut elapsed = BTreeMap::new();
    let mut passed = true;
    for g in cfg.genus.genera() {
        let t = Instant::now();
        let v = verify_genus(&pool, g, cfg.trials, cfg.seed, supplied.as_ref(), cfg.exhaustive_mu)?;
        elapsed.insert(g.get().to_string(), ms(t));
        passed &= v.passed();
        for c in &v.checks {
            rows.push(vec![
                g.get().to_string(),
                c.name.clone(),
                c.trials.to_string(),
                c.failures.to_string(),
            ]);
            summary.push_str(&format!(
                "g={g}: {} {} ({}/{} failures)\n",
                if c.passed() { "ok  " } else { "FAIL" },
                c.name,
                c.failures,
                c.trials
            ));
        }
        results.push(json!({
            "genus": v.genus,
            "passed": v.passed(),
            "checks": v.checks.iter().map(check_json).collect::<Vec<_>>(),
        }));
    }
    let report = envelope("verify", cfg, &hashes, Value::Array(results), passed, json!(elapsed));
    let text = render(cfg, &report, &["g", "check", "trials", "failures"], &rows);
    Ok(Outcome { report, text, summary, exit: exit_for(passed) })
}

pub fn cmd_eval(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("eval needs --input <catalog.json>".into()))?;
    let mut hashes = BTreeMap::new();
    let bytes = read(path)?;
    hashes.insert(path.display().to_string(), sha256_hex(&bytes));
    let catalog: Catalog = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let g = Genus::new(catalog.genus).map_err(|e| CliError::Schema(e.to_string()))?;
    let l = match &cfg.linking_matrix {
        Some(p) => Some(load_linking_matrix(p, &mut hashes)?),
        None => None,
    };
    if let Some(l) = &l {
        if l.genus() != g {
            return Err(CliError::Usage(format!(
                "linking matrix has genus {}, catalog has genus {g}",
                l.genus()
            )));
        }
    }
    let t = Instant::now();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    let mut summary = String::new();
    for entry in &catalog.entries {
        let label = entry.label().to_string();
        let (sigma, integral) = match entry.resolve(g)? {
            ResolvedEntry::Separating { twist, integral } => (sigma_separating(&twist)?, integral),
            ResolvedEntry::Bp(m) => (sigma_bp(&m)?, None),
        };
        let mut obj = json!({
            "label": label,
            "sigma": sigma.render(),
            "sigma_terms": BoolPolyJson::from_poly(&sigma),
        });
        summary.push_str(&format!("{label}: sigma = {sigma}\n"));
        let mut row = vec![label.clone(), sigma.render(), String::new(), String::new(), String::new()];
        if let Some(z) = integral {
            let rho = rho_separating(&z)?;
            let mu_rho = mu(&rho)?;
            obj["rho"] = json!(rho.render());
            obj["rho_terms"] = serde_json::to_value(CMPolyJson::from_poly(&rho)).expect("serializable");
            obj["mu_rho"] = json!(mu_rho.render());
            summary.push_str(&format!("{label}: rho = {rho}\n{label}: mu(rho) = {mu_rho}\n"));
            row[2] = rho.render();
            row[3] = mu_rho.render();
            if let Some(l) = &l {
                let eps = epsilon(l, &rho)?;
                obj["epsilon"] = json!(eps.to_string());
                summary.push_str(&format!("{label}: epsilon = {eps}\n"));
                row[4] = eps.to_string();
            }
        }
        rows.push(row);
        results.push(obj);
    }
    let report = envelope("eval", cfg, &hashes, Value::Array(results), true, json!(ms(t)));
    let text = render(cfg, &report, &["label", "sigma", "rho", "mu_rho", "epsilon"], &rows);
    Ok(Outcome { report, text, summary, exit: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_ranges_parse() {
        assert_eq!("3".parse::<GenusRange>().unwrap(), GenusRange { lo: 3, hi: 3 });
        assert_eq!("1..4".parse::<GenusRange>().unwrap(), GenusRange { lo: 1, hi: 4 });
        assert_eq!("2..=5".parse::<GenusRange>().unwrap(), GenusRange { lo: 2, hi: 5 });
        for bad in ["0", "4..2", "x", "1..33"] {
            assert!(bad.parse::<GenusRange>().is_err(), "{bad}");
        }
    }
}
