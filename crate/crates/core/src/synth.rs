//! Seeded generator for synthetic multi-repository workspaces with planted
//! bug tickets.
//!
//! Every generated source file carries a unique class name and unique method
//! names, and each ticket quotes the identifiers of the file it targets, so
//! the correct localization of every ticket is known by construction.

use std::collections::BTreeSet;
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::Ticket;

const DOMAINS: [&str; 12] = [
    "billing",
    "inventory",
    "shipping",
    "catalog",
    "identity",
    "loyalty",
    "pricing",
    "payments",
    "orders",
    "notifications",
    "reporting",
    "warehouse",
];
const COMPONENTS: [&str; 10] = [
    "api",
    "service",
    "validation",
    "persistence",
    "mapper",
    "events",
    "config",
    "client",
    "scheduler",
    "model",
];
const NOUNS: [&str; 20] = [
    "ledger",
    "invoice",
    "voucher",
    "parcel",
    "tariff",
    "account",
    "session",
    "coupon",
    "refund",
    "quota",
    "badge",
    "address",
    "carrier",
    "bundle",
    "waybill",
    "receipt",
    "credential",
    "segment",
    "channel",
    "forecast",
];
const VERBS: [&str; 10] = [
    "apply", "compute", "resolve", "check", "persist", "publish", "convert", "reserve", "release", "schedule",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub repos: usize,
    /// File-bearing directories per repository.
    pub dirs_per_repo: usize,
    pub files_per_dir: usize,
    /// Maximum directory nesting below the repository root.
    pub max_depth: usize,
    pub tickets_per_repo: usize,
    /// Probability that a file gets a long block of filler code.
    pub large_file_ratio: f64,
    pub with_attachments: bool,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            repos: 3,
            dirs_per_repo: 4,
            files_per_dir: 3,
            max_depth: 3,
            tickets_per_repo: 2,
            large_file_ratio: 0.1,
            with_attachments: true,
        }
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

struct PlannedFile {
    rel_path: String,
    class: String,
    methods: [String; 2],
    noun: &'static str,
}

fn source_text(domain: &str, dir: &str, f: &PlannedFile, filler: usize) -> String {
    let package = format!("com.example.{}.{}", domain, dir.replace('/', "."));
    let field = format!("{}Store", f.noun);
    let [m1, m2] = &f.methods;
    let mut s = format!(
        "// {class} handles {noun} logic for the {domain} service.\n\
         package {package};\n\n\
         public class {class} {{\n\
         \x20   private final {class}Store {field};\n\n\
         \x20   public {class}({class}Store {field}) {{\n\
         \x20       this.{field} = {field};\n\
         \x20   }}\n\n\
         \x20   public long {m1}(long {noun}Id) {{\n\
         \x20       return {field}.{m2}({noun}Id) + {m1}Offset({noun}Id);\n\
         \x20   }}\n\n\
         \x20   long {m2}(long {noun}Id) {{\n\
         \x20       // {m2} delegates to {m1}\n\
         \x20       return {field}.{m1}({noun}Id);\n\
         \x20   }}\n",
        class = f.class,
        noun = f.noun,
    );
    for i in 0..filler {
        s.push_str(&format!("\n    int padding{i}(int x) {{ return x + {i}; }}\n"));
    }
    s.push_str("}\n");
    s
}

/// Writes a synthetic workspace under `root` (which must exist) and returns
/// its planted tickets. The same `seed` always yields the same files.
pub fn generate_workspace(root: &Path, params: &SynthParams, seed: u64) -> Result<Vec<Ticket>> {
    if params.repos == 0 || params.dirs_per_repo == 0 || params.files_per_dir == 0 {
        return Err(Error::Precondition("synthetic workspace needs repos, dirs and files".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tickets = Vec::new();
    let mut uid = 0usize;

    for r in 0..params.repos {
        let domain = if r < DOMAINS.len() {
            DOMAINS[r].to_string()
        } else {
            format!("{}{}", DOMAINS[r % DOMAINS.len()], r / DOMAINS.len())
        };
        let repo_id = format!("{domain}-service");
        let repo_root = root.join(&repo_id);

        // Directory paths: each new directory nests under an earlier one
        // while the depth limit allows.
        let mut dirs: Vec<String> = Vec::new();
        for d in 0..params.dirs_per_repo {
            let name = match d / COMPONENTS.len() {
                0 => COMPONENTS[d].to_string(),
                n => format!("{}{n}", COMPONENTS[d % COMPONENTS.len()]),
            };
            let parent = if dirs.is_empty() || rng.random_bool(0.4) {
                None
            } else {
                dirs.choose(&mut rng).filter(|p| p.split('/').count() < params.max_depth.max(1))
            };
            dirs.push(match parent {
                Some(p) => format!("{p}/{name}"),
                None => name,
            });
        }

        let mut planned = Vec::new();
        for dir in &dirs {
            for _ in 0..params.files_per_dir {
                uid += 1;
                let noun = *NOUNS.choose(&mut rng).unwrap();
                let component = dir.rsplit('/').next().unwrap();
                let class = format!("{}{}{}{uid}", capitalize(&domain), capitalize(noun), capitalize(component));
                let v1 = VERBS.choose(&mut rng).unwrap();
                let v2 = VERBS.choose(&mut rng).unwrap();
                let methods = [format!("{v1}{}{uid}", capitalize(noun)), format!("{v2}{}Entry{uid}", capitalize(noun))];
                planned.push(PlannedFile {
                    rel_path: format!("src/{dir}/{class}.java"),
                    class,
                    methods,
                    noun,
                });
            }
        }

        for f in &planned {
            let dir = f.rel_path.trim_start_matches("src/").rsplit_once('/').unwrap().0;
            let filler = if rng.random_bool(params.large_file_ratio.clamp(0.0, 1.0)) {
                rng.random_range(200..800)
            } else {
                rng.random_range(0..4)
            };
            write(&repo_root.join(&f.rel_path), &source_text(&domain, dir, f, filler))?;
        }
        if params.with_attachments {
            write(
                &repo_root.join("README.md"),
                &format!(
                    "# {domain} service\n\nOwns {domain} data for the platform. Components: {}.\n",
                    dirs.join(", ")
                ),
            )?;
            write(&repo_root.join("docs/architecture.png"), "\u{89}PNG placeholder")?;
        }
        write(&repo_root.join(".gitignore"), "target/\n*.log\n")?;
        write(&repo_root.join("target/Generated.java"), "class Generated {}\n")?;

        let picks: BTreeSet<usize> = (0..params.tickets_per_repo.min(planned.len()))
            .map(|_| rng.random_range(0..planned.len()))
            .collect();
        for i in picks {
            let f = &planned[i];
            tickets.push(Ticket {
                id: format!("{}-{}", domain.to_uppercase(), tickets.len() + 1),
                title: format!("{} {} gives a wrong {} total", domain, f.methods[0], f.noun),
                body: format!(
                    "In the {domain} service, {} returns a stale value when {} is called from {}. \
                     The {} figure is off by one.",
                    f.methods[0], f.methods[1], f.class, f.noun
                ),
                truth_repos: [repo_id.clone()].into(),
                truth_files: [format!("{repo_id}/{}", f.rel_path)].into(),
            });
        }
    }
    Ok(tickets)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn listing(root: &Path) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for e in ignore::WalkBuilder::new(root).hidden(false).build() {
            let e = e.unwrap();
            if e.file_type().is_some_and(|t| t.is_file()) {
                let rel = e.path().strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read_to_string(e.path()).unwrap_or_default()));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn deterministic_for_a_seed() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let p = SynthParams::default();
        let ta = generate_workspace(a.path(), &p, 9).unwrap();
        let tb = generate_workspace(b.path(), &p, 9).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(listing(a.path()), listing(b.path()));
    }

    #[test]
    fn tickets_point_at_existing_files() {
        let tmp = tempfile::tempdir().unwrap();
        let p = SynthParams {
            repos: 4,
            dirs_per_repo: 6,
            ..SynthParams::default()
        };
        let tickets = generate_workspace(tmp.path(), &p, 3).unwrap();
        assert!(!tickets.is_empty());
        for t in &tickets {
            for f in &t.truth_files {
                assert!(tmp.path().join(f).is_file(), "{f}");
            }
        }
    }
}
