//! Command-line front end. Exit codes: 0 success, 1 domain violation or
//! property failure, 2 input error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::dynamics::PieceMap;
use crate::enumerate::{atlas, AtlasConfig, AtlasError, Classification};
use crate::fixtures::{builtin_case, builtin_cases, Fixture};
use crate::instance::{Instance, InstanceFile, Loaded, DEFAULT_WINDOW};
use crate::partition::Partition;
use crate::report::build_report;
use crate::selftest::{resolve_seed, run_selftest, DEFAULT_ITERATIONS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crossed-commutant", version, about = "Commutants of piecewise constant function algebras in crossed products by Z")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that an instance's maps respect its partitions.
    Validate(Source),
    /// Cycle classes, separation sets, commutant tables and grading verdict.
    Report(ReportArgs),
    /// Enumerate every placement, base map and lift; group by case signature.
    Atlas(AtlasArgs),
    /// Randomized oracle and algebraic-law suites.
    Selftest(SelftestArgs),
    /// List the built-in cases, or print one as an instance file.
    Cases {
        /// Print this case as instance JSON.
        name: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct Source {
    /// Instance file (JSON).
    #[arg(required_unless_present_any = ["paper_cases", "case"])]
    pub file: Option<PathBuf>,
    /// Run on every built-in case instead of a file.
    #[arg(long, conflicts_with_all = ["file", "case"])]
    pub paper_cases: bool,
    /// Run on one built-in case.
    #[arg(long, conflicts_with = "file")]
    pub case: Option<String>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub source: Source,
    /// Degrees |n| <= window are tabulated; overrides the file's "window".
    #[arg(long)]
    pub window: Option<i64>,
    #[arg(long, conflicts_with = "text")]
    pub json: bool,
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct AtlasArgs {
    /// Jump points of the base partition; defaults to the smallest base
    /// with room for the points in one interval or in two.
    #[arg(long)]
    pub base_points: Option<usize>,
    /// Number of points to add.
    #[arg(long, default_value_t = 2)]
    pub points: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Overridden by the CROSSED_COMMUTANT_SEED environment variable.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stdout: String, stderr: String) -> Outcome {
        Outcome { code, stdout, stderr }
    }
}

/// A named instance ready for analysis, or the reason it cannot be used.
struct Target {
    name: String,
    loaded: Result<Loaded, Outcome>,
    window: i64,
}

fn fixture_target(f: Fixture) -> Target {
    Target {
        name: f.name.to_string(),
        loaded: Ok(Loaded {
            refinement: f.instance.refinement,
            base_map: crate::instance::LoadedMap::Valid(f.instance.base_map),
            refined_map: crate::instance::LoadedMap::Valid(f.instance.refined_map),
            window: DEFAULT_WINDOW,
        }),
        window: DEFAULT_WINDOW,
    }
}

fn targets(source: &Source) -> Result<Vec<Target>, Outcome> {
    if source.paper_cases {
        return Ok(builtin_cases().into_iter().map(fixture_target).collect());
    }
    if let Some(name) = &source.case {
        return builtin_case(name).map(|f| vec![fixture_target(f)]).ok_or_else(|| {
            let known: Vec<_> = builtin_cases().iter().map(|f| f.name).collect();
            Outcome::fail(EXIT_INPUT, String::new(), format!("unknown case {name:?}; known: {}\n", known.join(", ")))
        });
    }
    let path = source.file.as_ref().expect("clap requires a file otherwise");
    let loaded = InstanceFile::read(path)
        .and_then(|file| file.load())
        .map_err(|e| Outcome::fail(EXIT_INPUT, String::new(), format!("{}: {e}\n", path.display())));
    let window = loaded.as_ref().map_or(DEFAULT_WINDOW, |l| l.window);
    Ok(vec![Target {
        name: path.display().to_string(),
        loaded,
        window,
    }])
}

/// Either a usable instance or the violation text that rules it out.
fn checked(loaded: &Loaded) -> Result<Instance, String> {
    let broken = loaded.map_errors();
    if !broken.is_empty() {
        return Err(broken.iter().map(|e| format!("not a permutation: {e}\n")).collect());
    }
    let instance = loaded.instance().expect("both maps are permutations");
    let report = instance.validate();
    if report.is_ok() {
        Ok(instance)
    } else {
        Err(format!("{report}\n"))
    }
}

pub fn cmd_validate(source: &Source) -> Outcome {
    let targets = match targets(source) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let mut code = EXIT_OK;
    let (mut out, mut err) = (String::new(), String::new());
    for target in targets {
        match &target.loaded {
            Err(o) => {
                code = code.max(o.code);
                err.push_str(&o.stderr);
            }
            Ok(loaded) => match checked(loaded) {
                Ok(_) => out.push_str(&format!("{}: ok\n", target.name)),
                Err(text) => {
                    code = code.max(EXIT_VIOLATION);
                    out.push_str(&format!("{}: invalid\n{text}", target.name));
                }
            },
        }
    }
    Outcome::fail(code, out, err)
}

pub fn cmd_report(args: &ReportArgs) -> Outcome {
    if let Some(w) = args.window {
        if w < 1 {
            return Outcome::fail(EXIT_INPUT, String::new(), "--window must be at least 1\n".into());
        }
    }
    let targets = match targets(&args.source) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let many = targets.len() > 1;
    let mut code = EXIT_OK;
    let (mut out, mut err) = (String::new(), String::new());
    let mut json_reports = Vec::new();
    for target in targets {
        let loaded = match &target.loaded {
            Err(o) => return o.clone(),
            Ok(l) => l,
        };
        let instance = match checked(loaded) {
            Ok(i) => i,
            Err(text) => {
                code = code.max(EXIT_VIOLATION);
                err.push_str(&format!("{}: invalid\n{text}", target.name));
                continue;
            }
        };
        let window = args.window.unwrap_or(target.window);
        let report = match build_report(&instance, window) {
            Ok(r) => r,
            Err(e) => {
                code = code.max(EXIT_VIOLATION);
                err.push_str(&format!("{}: {e}\n", target.name));
                continue;
            }
        };
        if args.json {
            json_reports.push(serde_json::json!({"name": target.name, "report": report}));
        } else {
            if many {
                out.push_str(&format!("== {} ==\n", target.name));
            }
            out.push_str(&report.to_text());
            if many {
                out.push('\n');
            }
        }
    }
    if args.json {
        let value = if many {
            serde_json::Value::Array(json_reports)
        } else {
            json_reports.pop().map(|mut v| v["report"].take()).unwrap_or(serde_json::Value::Null)
        };
        out = serde_json::to_string_pretty(&value).expect("json values serialize") + "\n";
    }
    Outcome::fail(code, out, err)
}

fn render_map(partition: &Partition, map: &PieceMap) -> String {
    let cycles: Vec<String> = map
        .cycles()
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| format!("({})", c.iter().map(|&p| partition.label(p)).collect::<Vec<_>>().join(" ")))
        .collect();
    if cycles.is_empty() {
        "id".into()
    } else {
        cycles.join("")
    }
}

pub fn render_atlas(classification: &Classification) -> String {
    let mut out = format!("{} signatures over {} instances\n", classification.len(), classification.total());
    for (signature, class) in &classification.classes {
        let inst = &class.representative;
        let placed: Vec<String> = inst
            .refinement
            .child_table()
            .iter()
            .enumerate()
            .filter(|(_, kids)| kids.len() > 1)
            .map(|(b, kids)| format!("{}:{}", inst.refinement.base().label(b), (kids.len() - 1) / 2))
            .collect();
        out.push_str(&format!(
            "{:<28} {:>5}  points [{}]  base {}  lift {}\n",
            signature.to_string(),
            class.count,
            placed.join(" "),
            render_map(inst.refinement.base(), &inst.base_map),
            render_map(inst.refinement.refined(), &inst.refined_map),
        ));
    }
    out
}

pub fn cmd_atlas(args: &AtlasArgs) -> Outcome {
    let mut config = AtlasConfig::minimal_for(args.points);
    if let Some(n) = args.base_points {
        config.base_points = n;
    }
    match atlas(config) {
        Ok(c) if args.json => Outcome::ok(serde_json::to_string_pretty(&c.rows()).expect("rows serialize") + "\n"),
        Ok(c) => Outcome::ok(render_atlas(&c)),
        Err(e @ AtlasError::ScaleExceeded { .. }) => Outcome::fail(EXIT_INPUT, String::new(), format!("{e}\n")),
        Err(e) => Outcome::fail(EXIT_VIOLATION, String::new(), format!("{e}\n")),
    }
}

pub fn cmd_selftest(args: &SelftestArgs) -> Outcome {
    let seed = match resolve_seed(args.seed) {
        Ok(s) => s,
        Err(e) => return Outcome::fail(EXIT_INPUT, String::new(), format!("{e}\n")),
    };
    let report = run_selftest(seed, args.iterations);
    let text = if args.json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        format!("{report}\n")
    };
    let code = if report.ok() { EXIT_OK } else { EXIT_VIOLATION };
    Outcome::fail(code, text, String::new())
}

pub fn cmd_cases(name: Option<&str>) -> Outcome {
    match name {
        None => Outcome::ok(
            builtin_cases()
                .iter()
                .map(|f| {
                    let rules: Vec<String> = f.rules.iter().map(|r| r.describe()).collect();
                    let rules = if rules.is_empty() { "no change".to_string() } else { rules.join("; ") };
                    format!("{:<38} {}  [{rules}]\n", f.name, f.summary)
                })
                .collect(),
        ),
        Some(n) => match builtin_case(n) {
            Some(f) => Outcome::ok(f.instance.to_file(Some(DEFAULT_WINDOW)).to_json() + "\n"),
            None => Outcome::fail(EXIT_INPUT, String::new(), format!("unknown case {n:?}\n")),
        },
    }
}

pub fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate(source) => cmd_validate(source),
        Command::Report(args) => cmd_report(args),
        Command::Atlas(args) => cmd_atlas(args),
        Command::Selftest(args) => cmd_selftest(args),
        Command::Cases { name } => cmd_cases(name.as_deref()),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(text)
            } else {
                Outcome::fail(code, String::new(), text)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn temp_file(contents: &str) -> tempfile_like::TempPath {
        tempfile_like::write(contents)
    }

    /// Minimal self-cleaning temp file so tests need no extra crate.
    mod tempfile_like {
        use std::path::PathBuf;
        use std::sync::atomic::{AtomicUsize, Ordering};

        pub struct TempPath(pub PathBuf);

        impl Drop for TempPath {
            fn drop(&mut self) {
                let _ = std::fs::remove_file(&self.0);
            }
        }

        pub fn write(contents: &str) -> TempPath {
            static NEXT: AtomicUsize = AtomicUsize::new(0);
            let path = std::env::temp_dir().join(format!(
                "crossed-commutant-{}-{}.json",
                std::process::id(),
                NEXT.fetch_add(1, Ordering::Relaxed)
            ));
            std::fs::write(&path, contents).unwrap();
            TempPath(path)
        }
    }

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("crossed-commutant").chain(args.iter().copied()))
    }

    #[test]
    fn validate_accepts_builtin_case() {
        let o = run_args(&["validate", "--case", "one-interval-subinterval-swap"]);
        assert_eq!(o.code, EXIT_OK, "{o:?}");
        let o = run_args(&["validate", "--paper-cases"]);
        assert_eq!(o.code, EXIT_OK);
        assert_eq!(o.stdout.lines().count(), builtin_cases().len());
    }

    #[test]
    fn validate_names_the_broken_rule() {
        let f = temp_file(r#"{"type":"real_line","jump_points":["0","1"],"perm":[4,1,2,3,0]}"#);
        let o = run_args(&["validate", f.0.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_VIOLATION);
        assert!(o.stdout.contains("Lemma 1 violated: piece 0 (Interval) ↦ piece 4 (Point)"), "{}", o.stdout);
    }

    #[test]
    fn validate_names_unequal_child_counts() {
        let f = temp_file(
            r#"{"type":"real_line","jump_points":["0"],"additions":{"0":["-1"]},
                "base_perm":[1,0,2],"refined_perm":[2,0,1,3,4]}"#,
        );
        let o = run_args(&["validate", f.0.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_VIOLATION);
        assert!(o.stdout.contains("Lemma 3"), "{}", o.stdout);
    }

    #[test]
    fn parse_errors_exit_two() {
        let f = temp_file("{ \"type\": ");
        let o = run_args(&["validate", f.0.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.contains("line"));
        let o = run_args(&["validate", "/nonexistent/instance.json"]);
        assert_eq!(o.code, EXIT_INPUT);
        let o = run_args(&["frobnicate"]);
        assert_eq!(o.code, EXIT_INPUT);
    }

    #[test]
    fn non_bijective_perm_is_a_violation() {
        let f = temp_file(r#"{"type":"abstract","pieces":2,"perm":[0,0]}"#);
        let o = run_args(&["validate", f.0.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_VIOLATION);
        assert!(o.stdout.contains("not a permutation"));
    }

    #[test]
    fn report_json_round_trips_through_file() {
        let dumped = run_args(&["cases", "one-interval-three-cycle"]);
        let f = temp_file(&dumped.stdout);
        let o = run_args(&["report", f.0.to_str().unwrap(), "--window", "3", "--json"]);
        assert_eq!(o.code, EXIT_OK, "{o:?}");
        let parsed = crate::report::Report::from_json(&o.stdout).unwrap();
        assert_eq!(parsed.window, 3);
        let text = run_args(&["report", f.0.to_str().unwrap(), "--window", "3"]);
        assert!(text.stdout.contains("I_1^1"));
    }

    #[test]
    fn report_on_invalid_instance_exits_one() {
        let f = temp_file(r#"{"type":"real_line","jump_points":["0"],"perm":[2,1,0]}"#);
        let o = run_args(&["report", f.0.to_str().unwrap()]);
        assert_eq!(o.code, EXIT_VIOLATION);
    }

    #[test]
    fn atlas_row_counts() {
        let count = |pts: &str| run_args(&["atlas", "--points", pts, "--json"]);
        for (pts, rows) in [("0", 1), ("1", 2), ("2", 6)] {
            let o = count(pts);
            assert_eq!(o.code, EXIT_OK);
            let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
            assert_eq!(v.as_array().unwrap().len(), rows, "{pts} points");
        }
        let o = run_args(&["atlas", "--points", "4", "--base-points", "4"]);
        assert_eq!(o.code, EXIT_INPUT);
        assert!(o.stderr.contains("scale exceeded"));
    }

    #[test]
    fn selftest_small() {
        let o = run_args(&["selftest", "--seed", "9", "--iterations", "30"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
        assert!(o.stdout.contains("sep formula = oracle: 30/30"));
    }

    #[test]
    fn cases_listing() {
        let o = run_args(&["cases"]);
        assert!(o.stdout.contains("two-intervals-four-cycle"));
        assert_eq!(run_args(&["cases", "nope"]).code, EXIT_INPUT);
    }
}
