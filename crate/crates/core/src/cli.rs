//! Command-line front end. Exit codes: 0 success, 1 negative verdict,
//! 2 usage, input or parse error.

use std::io::{Read, Write};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::axioms::is_clone_structure;
use crate::clones::{all_clone_sets, brute_force_clone_sets};
use crate::election::{DecloneResult, Profile};
use crate::error::{Error, Result};
use crate::pqtree::{build_tree, build_tree_unchecked, PqTree};
use crate::set::{CandidateSet, SetFamily};
use crate::single_crossing::{
    brute_force_sc, fixed_order_analysis, is_single_crossing, sc_declone_exact, x3c_reduction, VoterOrder, X3CInstance,
    DEFAULT_EXACT_BUDGET,
};
use crate::single_peaked::{basic_declone_sp, brute_force_axis, brute_force_optimal_sp_declone, declone_sp, is_single_peaked};
use crate::synthesis::{
    implement_fat, implement_single_crossing, implement_single_peaked_tree, implement_string, implement_tree, random_tree, slide,
};
use crate::util::random_profile;

#[derive(Parser, Debug)]
#[command(name = "clonelab", version, about = "Clone sets, clone structures and decloning of preference profiles")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every clone set of a profile.
    Clones {
        /// Profile file, or `-` for stdin.
        input: String,
        /// Use exhaustive subset enumeration (m <= 16).
        #[arg(long)]
        oracle: bool,
    },
    /// Check a set family against the clone-structure axioms.
    CheckFamily { input: String },
    /// PQ-tree of a profile's clone sets, or of a family given as JSON.
    Pqtree {
        input: String,
        /// Emit Graphviz instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Build a profile implementing a clone structure.
    Implement {
        input: String,
        #[arg(long, value_enum, default_value_t = Flavor::Minimal)]
        flavor: Flavor,
    },
    /// Single-peakedness check with a witness axis.
    SpCheck {
        input: String,
        /// Try every axis (m <= 8).
        #[arg(long)]
        oracle: bool,
    },
    /// Declone a profile until it is single-peaked.
    SpDeclone {
        input: String,
        #[arg(long, value_enum, default_value_t = Algorithm::Full)]
        algorithm: Algorithm,
        /// Exhaustive search instead (m <= 7).
        #[arg(long)]
        oracle: bool,
        /// Emit the clone tree coloring as Graphviz (basic algorithm only).
        #[arg(long)]
        dot: bool,
    },
    /// Single-crossingness check with a witness voter order.
    ScCheck {
        input: String,
        /// Try every voter order (n <= 8).
        #[arg(long)]
        oracle: bool,
    },
    /// Declone so the profile is single-crossing for a given voter order.
    ScDecloneFixed {
        input: String,
        /// Voter order as comma-separated indices; defaults to 0,1,...,n-1.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Search for a single-crossing decloning with at least k candidates.
    ScDecloneExact {
        input: String,
        #[arg(long)]
        k: usize,
        /// Maximum number of distinct profiles to visit.
        #[arg(long, default_value_t = DEFAULT_EXACT_BUDGET)]
        budget: usize,
    },
    /// Generate profiles and instances.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Flavor {
    /// At most three voters.
    Minimal,
    SingleCrossing,
    SinglePeaked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Basic,
    Full,
}

#[derive(Subcommand, Debug)]
enum Gen {
    /// One voter over m candidates.
    String { m: usize },
    /// Minimal profile with only trivial clone sets.
    Fat { m: usize },
    /// The m-voter slide.
    Slide { m: usize },
    /// Implement a PQ-tree given as JSON.
    ComposeFromTree {
        input: String,
        #[arg(long, value_enum, default_value_t = Flavor::Minimal)]
        flavor: Flavor,
    },
    /// Decloning instance encoding an exact-cover-by-3-sets instance.
    X3c {
        input: String,
        /// Base set size is 3k; inferred from the largest element if absent.
        #[arg(long)]
        k: Option<usize>,
        /// Write the block-to-set mapping as JSON to this file.
        #[arg(long)]
        sidecar: Option<String>,
    },
    /// Uniformly random profile.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Random PQ-tree over m leaves.
    RandomTree {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
    },
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    format: Format,
}

enum Outcome {
    Ok,
    Negative,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String> {
        let mut s = String::new();
        if path == "-" {
            self.stdin.read_to_string(&mut s).map_err(|e| Error::Io(format!("stdin: {e}")))?;
        } else {
            s = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?;
        }
        Ok(s)
    }

    fn profile(&mut self, path: &str) -> Result<Profile> {
        profile_from(&self.read(path)?)
    }

    fn emit(&mut self, value: &serde_json::Value, text: impl FnOnce() -> String) -> Result<()> {
        let s = match self.format {
            Format::Json => format!("{value}\n"),
            Format::Text => text(),
        };
        self.out.write_all(s.as_bytes()).map_err(|e| Error::Io(format!("write: {e}")))
    }

    fn emit_raw(&mut self, s: &str) -> Result<()> {
        self.out.write_all(s.as_bytes()).map_err(|e| Error::Io(format!("write: {e}")))
    }

    fn emit_profile(&mut self, p: &Profile) -> Result<()> {
        self.emit(&p.to_json_value(), || p.to_text())
    }

    fn emit_declone(&mut self, original: &Profile, r: &DecloneResult) -> Result<()> {
        self.emit(&r.to_json_value(original), || {
            let mut s = r.profile.to_text();
            for (set, fresh) in &r.mapping {
                s.push_str(&format!("# {} = {}\n", r.profile.name(*fresh), original.display_set(set)));
            }
            s
        })
    }
}

fn family_text(f: &SetFamily, p: Option<&Profile>) -> String {
    f.iter()
        .map(|s| match p {
            Some(p) => format!("{}\n", p.display_set(s)),
            None => format!("{s}\n"),
        })
        .collect()
}

/// Profiles are read as text, or as JSON when the input is an object.
fn profile_from(text: &str) -> Result<Profile> {
    if text.trim_start().starts_with('{') {
        Profile::from_json(text)
    } else {
        Profile::parse(text)
    }
}

fn looks_like_family(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text).is_ok_and(|v| v.get("sets").is_some())
}

fn require_tree(f: &SetFamily) -> Result<std::result::Result<PqTree, serde_json::Value>> {
    let report = is_clone_structure(f);
    if !report.verdict {
        return Ok(Err(report.to_json_value()));
    }
    build_tree(f).map(Ok)
}

fn implement_with(t: &PqTree, flavor: Flavor) -> Result<Profile> {
    match flavor {
        Flavor::Minimal => implement_tree(t),
        Flavor::SingleCrossing => implement_single_crossing(&crate::pqtree::tree_to_family(t)),
        Flavor::SinglePeaked => implement_single_peaked_tree(t),
    }
}

fn execute(cli: Cli, io: &mut Io) -> Result<Outcome> {
    match cli.command {
        Command::Clones { input, oracle } => {
            let p = io.profile(&input)?;
            let f = if oracle { brute_force_clone_sets(&p)? } else { all_clone_sets(&p) };
            io.emit(&f.to_json_value(), || family_text(&f, Some(&p)))?;
        }
        Command::CheckFamily { input } => {
            let f = SetFamily::from_json(&io.read(&input)?)?;
            let report = is_clone_structure(&f);
            io.emit(&report.to_json_value(), || {
                if report.verdict {
                    return "clone structure\n".into();
                }
                let mut s = String::from("not a clone structure\n");
                for v in &report.violations {
                    let w: Vec<String> = v.witness.iter().map(CandidateSet::to_string).collect();
                    s.push_str(&format!("{}: {}\n", v.axiom, w.join(" ")));
                }
                s
            })?;
            if !report.verdict {
                return Ok(Outcome::Negative);
            }
        }
        Command::Pqtree { input, dot } => {
            let text = io.read(&input)?;
            let (t, names) = if looks_like_family(&text) {
                match require_tree(&SetFamily::from_json(&text)?)? {
                    Ok(t) => (t, None),
                    Err(report) => {
                        io.emit(&report, || "not a clone structure\n".into())?;
                        return Ok(Outcome::Negative);
                    }
                }
            } else {
                let p = profile_from(&text)?;
                (build_tree_unchecked(&all_clone_sets(&p)), Some(p))
            };
            let name = |c: usize| names.as_ref().map_or(c.to_string(), |p| p.name(c));
            if dot {
                io.emit_raw(&t.to_dot(&name, None))?;
            } else {
                io.emit(&t.to_json_value(), || format!("{}\n", t.shape().to_bracket()))?;
            }
        }
        Command::Implement { input, flavor } => {
            let f = SetFamily::from_json(&io.read(&input)?)?;
            match require_tree(&f)? {
                Ok(t) => io.emit_profile(&implement_with(&t, flavor)?)?,
                Err(report) => {
                    io.emit(&report, || "not a clone structure\n".into())?;
                    return Ok(Outcome::Negative);
                }
            }
        }
        Command::SpCheck { input, oracle } => {
            let p = io.profile(&input)?;
            let axis = if oracle { brute_force_axis(&p)? } else { is_single_peaked(&p) };
            let value = json!({ "single_peaked": axis.is_some(), "axis": axis.as_ref().map(|a| a.order()) });
            io.emit(&value, || match &axis {
                Some(a) => format!("{}\n", a.order().iter().map(|&c| p.name(c)).collect::<Vec<_>>().join(" > ")),
                None => "not single-peaked\n".into(),
            })?;
            if axis.is_none() {
                return Ok(Outcome::Negative);
            }
        }
        Command::SpDeclone { input, algorithm, oracle, dot } => {
            let p = io.profile(&input)?;
            if dot {
                let (_, coloring) = basic_declone_sp(&p);
                io.emit_raw(&coloring.to_dot(&|c| p.name(c)))?;
                return Ok(Outcome::Ok);
            }
            let r = match (oracle, algorithm) {
                (true, _) => brute_force_optimal_sp_declone(&p)?,
                (false, Algorithm::Basic) => basic_declone_sp(&p).0,
                (false, Algorithm::Full) => declone_sp(&p),
            };
            io.emit_declone(&p, &r)?;
        }
        Command::ScCheck { input, oracle } => {
            let p = io.profile(&input)?;
            let order = if oracle { brute_force_sc(&p)? } else { is_single_crossing(&p) };
            let value = json!({ "single_crossing": order.is_some(), "order": order.as_ref().map(|o| o.voters()) });
            io.emit(&value, || match &order {
                Some(o) => format!("{}\n", o.voters().iter().map(usize::to_string).collect::<Vec<_>>().join(" ")),
                None => "not single-crossing\n".into(),
            })?;
            if order.is_none() {
                return Ok(Outcome::Negative);
            }
        }
        Command::ScDecloneFixed { input, order } => {
            let p = io.profile(&input)?;
            let ord = match order {
                Some(v) => VoterOrder::new(v)?,
                None => VoterOrder::identity(p.n()),
            };
            let a = fixed_order_analysis(&p, &ord)?;
            let r = crate::election::declone(&p, &a.collapsed)?;
            if io.format == Format::Json {
                let mut v = r.to_json_value(&p);
                v["violating_pairs"] = json!(a.violating_pairs);
                v["closures"] = json!(a.closures);
                v["laminar"] = json!(a.laminar);
                io.emit(&v, String::new)?;
            } else {
                io.emit_declone(&p, &r)?;
            }
        }
        Command::ScDecloneExact { input, k, budget } => {
            let p = io.profile(&input)?;
            match sc_declone_exact(&p, k, budget)? {
                Some(r) => io.emit_declone(&p, &r)?,
                None => {
                    io.emit(&json!({ "feasible": false, "k": k }), || format!("no single-crossing decloning with {k} candidates\n"))?;
                    return Ok(Outcome::Negative);
                }
            }
        }
        Command::Gen(g) => generate(g, io)?,
    }
    Ok(Outcome::Ok)
}

fn generate(g: Gen, io: &mut Io) -> Result<()> {
    match g {
        Gen::String { m } => io.emit_profile(&implement_string(m)?),
        Gen::Fat { m } => io.emit_profile(&implement_fat(m)?),
        Gen::Slide { m } => io.emit_profile(&slide(m)?),
        Gen::ComposeFromTree { input, flavor } => {
            let t = PqTree::from_json(&io.read(&input)?)?;
            io.emit_profile(&implement_with(&t, flavor)?)
        }
        Gen::X3c { input, k, sidecar } => {
            let inst = X3CInstance::parse(&io.read(&input)?, k)?;
            let red = x3c_reduction(&inst)?;
            if let Some(path) = sidecar {
                std::fs::write(&path, format!("{}\n", red.sidecar_json())).map_err(|e| Error::Io(format!("{path}: {e}")))?;
            }
            let mut v = red.profile.to_json_value();
            v["target"] = json!(red.target);
            io.emit(&v, || format!("# target {}\n{}", red.target, red.profile.to_text()))
        }
        Gen::Random { m, n, seed } => {
            if m == 0 || n == 0 {
                return Err(Error::Precondition("m and n must be positive".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            io.emit_profile(&random_profile(m, n, &mut rng))
        }
        Gen::RandomTree { m, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_tree(m, &mut rng)?;
            io.emit(&t.to_json_value(), || format!("{}\n", t.shape().to_bracket()))
        }
    }
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                2
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut io = Io { stdin, out: stdout, format: cli.format };
    match execute(cli, &mut io) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Negative) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}
