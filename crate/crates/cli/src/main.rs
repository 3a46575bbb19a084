//! Batch front end over the workbench library: load a JSON description of an
//! instance (and, where relevant, a tree or loose tree), run the requested
//! check, and emit a JSON report.
//!
//! Exit codes: `0` when every checked property holds, `1` when a property is
//! false or a report contains a FAIL, `2` on usage or input errors. Reports
//! are byte-deterministic for a fixed input: maps are ordered, structs have a
//! fixed field order, and nothing time- or path-dependent is embedded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use amalgam_core::instances::{DisjointSets, PowersetNaming, QChainFixture, VectorSpaceF2};
use amalgam_core::kernel::{
    check_axioms_a, check_axioms_c, check_axioms_d, check_prop_base_monotonicity,
    check_theorem_transind, check_theorem_transprime, replay_counterexample, Atom, AxiomReport,
    ClassInstance, Model,
};
use amalgam_core::loose::{
    check_conclusion, check_free_all_enumerations, find_witness, omission_transform,
    quotient_check, swap_transform, validate_witness, LooseTree, WitnessSequence,
};
use amalgam_core::tree::{
    all_enumerations, neighbor_path, quotient, Enumeration, Ideal, Limits, Tree, TreeIndex,
    TreeNode,
};

#[derive(Parser)]
#[command(name = "amalgam", version, about = "Axiom and loose-tree workbench over finite class fragments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Path to the JSON input description.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Node-count cap when listing all enumerations of a tree.
    #[arg(long, global = true, value_name = "N", default_value_t = 8)]
    bound: usize,

    /// Re-check the FAIL counterexamples recorded in this report file
    /// (check-axioms only).
    #[arg(long, global = true, value_name = "PATH")]
    replay: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the axiom checkers named by the config over its instance.
    CheckAxioms,
    /// Operations on bare index trees.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Operations on loose trees of models over an instance.
    #[command(subcommand)]
    LooseTree(LooseCmd),
}

#[derive(Subcommand)]
enum TreeCmd {
    /// List every enumeration of the tree.
    Enumerate,
    /// Print a swap path connecting the two enumerations `e1` and `e2`.
    Neighbors,
    /// Print the quotient by the configured ideal: node set plus meet table.
    Quotient,
}

#[derive(Subcommand)]
enum LooseCmd {
    /// Check the loose-tree conditions on the configured assignment.
    Validate,
    /// Decide freeness under every enumeration.
    Free,
    /// Print the explicit prime completion and its witness sequence.
    Prime,
    /// Swap two adjacent incomparable witness entries and revalidate.
    Swap,
    /// Omit a non-root node, absorbing its model into the predecessor.
    Omit,
    /// Collapse an ideal to an explicit prime and check freeness + extension.
    QuotientCheck,
    /// Freeness under all enumerations plus primality of the completion.
    Conclusion,
}

/// Input-side problems exit 2; false properties and failed engine
/// preconditions exit 1 (after emitting an `{"error": ...}` report).
enum CliError {
    Input(String),
    Property(String),
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn config_err(msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("ConfigParse: {msg}"))
}

fn property(msg: impl std::fmt::Display) -> CliError {
    CliError::Property(msg.to_string())
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Property(msg)) => {
            let _ = emit(cli.out.as_deref(), &ErrorReport { error: &msg });
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Dispatches the subcommand; `Ok(pass)` means the report was emitted and the
/// checked property held (`true`) or was found false (`false`).
fn run(cli: &Cli) -> Result<bool, CliError> {
    let config = load_config(cli.config.as_deref())?;
    if cli.replay.is_some() && !matches!(cli.command, Command::CheckAxioms) {
        return Err(input("--replay applies only to check-axioms"));
    }
    match &cli.command {
        Command::CheckAxioms => match &cli.replay {
            Some(path) => cmd_replay(cli, &config, path),
            None => cmd_check_axioms(cli, &config),
        },
        Command::Tree(sub) => cmd_tree(cli, &config, sub),
        Command::LooseTree(sub) => cmd_loose_tree(cli, &config, sub),
    }
}

fn load_config(path: Option<&Path>) -> Result<Value, CliError> {
    let path = path.ok_or_else(|| input("ConfigParse: --config PATH is required"))?;
    let text = fs::read_to_string(path)
        .map_err(|e| config_err(format_args!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| config_err(format_args!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, report: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| input(format!("cannot serialize the report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Instance configs
// ---------------------------------------------------------------------------

fn parse_instance(v: &Value) -> Result<Box<dyn ClassInstance>, CliError> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| config_err("instance description needs a string \"kind\""))?;
    match kind {
        "disjoint_sets" => {
            #[derive(Deserialize)]
            struct C {
                universe: Vec<String>,
            }
            let c: C = from_value(v)?;
            let inst = DisjointSets::new(c.universe.iter().map(Atom::new)).map_err(config_err)?;
            Ok(Box::new(inst))
        }
        "vector_space_f2" => {
            #[derive(Deserialize)]
            struct C {
                dim: usize,
            }
            let c: C = from_value(v)?;
            Ok(Box::new(VectorSpaceF2::new(c.dim).map_err(config_err)?))
        }
        "powerset_naming" => {
            #[derive(Deserialize)]
            struct C {
                u_max: usize,
                variant: u8,
            }
            let c: C = from_value(v)?;
            Ok(Box::new(PowersetNaming::new(c.u_max, c.variant).map_err(config_err)?))
        }
        "q_chain" => Ok(Box::new(QChainFixture::new())),
        other => Err(input(format!("UnknownInstance: \"{other}\""))),
    }
}

fn from_value<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, CliError> {
    serde_json::from_value(v.clone()).map_err(config_err)
}

/// Default sharpness bound: the largest carrier in the fragment.
fn default_lambda(inst: &dyn ClassInstance) -> usize {
    inst.fragment().iter().map(|m| m.carrier().len()).max().unwrap_or(0)
}

/// A model named in a config, by fragment id (`m3`) or description (`{a,b}`).
fn resolve_model(inst: &dyn ClassInstance, id: &str) -> Result<Model, CliError> {
    inst.fragment()
        .iter()
        .find(|m| m.id() == id || m.describe() == id)
        .cloned()
        .ok_or_else(|| config_err(format_args!("unknown model \"{id}\" in the {} fragment", inst.name())))
}

// ---------------------------------------------------------------------------
// check-axioms
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct AxiomsConfig {
    #[serde(default)]
    groups: Option<Vec<String>>,
    #[serde(default)]
    lambda: Option<usize>,
}

const ALL_GROUPS: [&str; 6] = ["A", "C", "D", "monotonicity", "transind", "transprime"];

fn cmd_check_axioms(cli: &Cli, config: &Value) -> Result<bool, CliError> {
    let inst = parse_instance(config)?;
    let inst = inst.as_ref();
    let cfg: AxiomsConfig = from_value(config)?;
    let lambda = cfg.lambda.unwrap_or_else(|| default_lambda(inst));
    let groups = cfg.groups.unwrap_or_else(|| ALL_GROUPS.map(String::from).to_vec());
    let mut report = AxiomReport::new(inst.name(), Vec::new());
    for group in &groups {
        let next = match group.as_str() {
            "A" => check_axioms_a(inst, lambda),
            "C" => check_axioms_c(inst),
            "D" => check_axioms_d(inst),
            "monotonicity" => check_prop_base_monotonicity(inst),
            "transind" => check_theorem_transind(inst),
            "transprime" => check_theorem_transprime(inst),
            other => {
                return Err(config_err(format_args!(
                    "unknown group \"{other}\" (expected one of {ALL_GROUPS:?})"
                )))
            }
        };
        report = report.merge(next);
    }
    emit(cli.out.as_deref(), &report)?;
    Ok(!report.has_fail())
}

#[derive(Serialize)]
struct ReplayEntry {
    axiom: String,
    ids: Vec<String>,
    reproduces: bool,
}

#[derive(Serialize)]
struct ReplayReport {
    instance: String,
    checked: usize,
    replays: Vec<ReplayEntry>,
}

fn cmd_replay(cli: &Cli, config: &Value, path: &Path) -> Result<bool, CliError> {
    let inst = parse_instance(config)?;
    let inst = inst.as_ref();
    let cfg: AxiomsConfig = from_value(config)?;
    let lambda = cfg.lambda.unwrap_or_else(|| default_lambda(inst));
    let text = fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let report: AxiomReport = serde_json::from_str(&text)
        .map_err(|e| input(format!("{} is not a report: {e}", path.display())))?;
    let mut replays = Vec::new();
    for entry in &report.entries {
        if entry.verdict != amalgam_core::kernel::Verdict::Fail {
            continue;
        }
        let ids = entry.counterexample.clone().ok_or_else(|| {
            input(format!("{}: FAIL entry {} has no counterexample", path.display(), entry.axiom))
        })?;
        let reproduces = replay_counterexample(inst, &entry.axiom, &ids, lambda)
            .map_err(|e| input(format!("cannot replay {}: {e}", entry.axiom)))?;
        replays.push(ReplayEntry { axiom: entry.axiom.clone(), ids, reproduces });
    }
    let out = ReplayReport {
        instance: inst.name().to_string(),
        checked: replays.len(),
        replays,
    };
    emit(cli.out.as_deref(), &out)?;
    Ok(out.replays.iter().all(|r| r.reproduces))
}

// ---------------------------------------------------------------------------
// tree
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct TreeConfig {
    tree: Vec<Vec<u32>>,
    #[serde(default)]
    e1: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    e2: Option<Vec<Vec<u32>>>,
    #[serde(default)]
    ideal: Option<Vec<Vec<u32>>>,
}

/// Trees described in configs are validated structurally; size is capped by
/// `--bound` at enumeration time rather than at parse time.
const WIDE: Limits = Limits { max_height: 16, max_branching: u32::MAX, max_enum_nodes: 16 };

fn nodes_of(paths: &[Vec<u32>]) -> Vec<TreeNode> {
    paths.iter().map(|p| TreeNode::new(p.clone())).collect()
}

fn tree_from(paths: &[Vec<u32>]) -> Result<Tree, CliError> {
    Tree::new(nodes_of(paths), &WIDE).map_err(config_err)
}

fn enumeration_from(tree: &impl TreeIndex, paths: &[Vec<u32>]) -> Result<Enumeration, CliError> {
    Enumeration::new(tree, nodes_of(paths)).map_err(config_err)
}

#[derive(Serialize)]
struct EnumerateReport<'a> {
    tree: &'a [TreeNode],
    count: usize,
    enumerations: Vec<Enumeration>,
}

#[derive(Serialize)]
struct NeighborsReport {
    path: Vec<usize>,
    length: usize,
}

fn cmd_tree(cli: &Cli, config: &Value, sub: &TreeCmd) -> Result<bool, CliError> {
    let cfg: TreeConfig = from_value(config)?;
    let tree = tree_from(&cfg.tree)?;
    match sub {
        TreeCmd::Enumerate => {
            let enumerations = all_enumerations(&tree, cli.bound).map_err(config_err)?;
            let report = EnumerateReport {
                tree: tree.nodes(),
                count: enumerations.len(),
                enumerations,
            };
            emit(cli.out.as_deref(), &report)?;
        }
        TreeCmd::Neighbors => {
            let e1 = cfg.e1.as_deref().ok_or_else(|| config_err("neighbors needs \"e1\""))?;
            let e2 = cfg.e2.as_deref().ok_or_else(|| config_err("neighbors needs \"e2\""))?;
            let e1 = enumeration_from(&tree, e1)?;
            let e2 = enumeration_from(&tree, e2)?;
            let path = neighbor_path(&e1, &e2).map_err(config_err)?;
            let report = NeighborsReport { length: path.len(), path };
            emit(cli.out.as_deref(), &report)?;
        }
        TreeCmd::Quotient => {
            let members = cfg.ideal.as_deref().ok_or_else(|| config_err("quotient needs \"ideal\""))?;
            let ideal = Ideal::new(&tree, nodes_of(members)).map_err(config_err)?;
            let q = quotient(&tree, &ideal).map_err(config_err)?;
            emit(cli.out.as_deref(), &q)?;
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// loose-tree
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct LooseConfig {
    instance: Value,
    tree: Vec<Vec<u32>>,
    assign: BTreeMap<String, String>,
    ambient: String,
    /// Base enumeration for prime/swap/omit; defaults to the sorted node order.
    #[serde(default)]
    enumeration: Option<Vec<Vec<u32>>>,
    /// Swap position `i`: the witness entries at `i` and `i + 1` are exchanged.
    #[serde(default)]
    position: Option<usize>,
    /// Path of the node to omit.
    #[serde(default)]
    omit: Option<Vec<u32>>,
    /// Members of the ideal to collapse.
    #[serde(default)]
    ideal: Option<Vec<Vec<u32>>>,
}

fn build_loose<'a>(cfg: &LooseConfig, inst: &'a dyn ClassInstance) -> Result<LooseTree<'a>, CliError> {
    let tree = tree_from(&cfg.tree)?;
    let mut assign = BTreeMap::new();
    for (key, id) in &cfg.assign {
        let node = TreeNode::parse_key(key)
            .ok_or_else(|| config_err(format_args!("bad node key \"{key}\" in \"assign\"")))?;
        assign.insert(node, resolve_model(inst, id)?);
    }
    let ambient = resolve_model(inst, &cfg.ambient)?;
    LooseTree::new(tree, assign, ambient, inst).map_err(property)
}

fn base_enumeration(cfg: &LooseConfig, lt: &LooseTree<'_>) -> Result<Enumeration, CliError> {
    match &cfg.enumeration {
        Some(paths) => enumeration_from(lt.index(), paths),
        None => Ok(lt.default_enumeration()),
    }
}

fn witness_or_not_free(lt: &LooseTree<'_>, e: &Enumeration) -> Result<WitnessSequence, CliError> {
    find_witness(lt, e).ok_or_else(|| property("the loose tree is not free"))
}

/// The external loose-tree shape: node paths, assignment by node key, ambient id.
#[derive(Serialize)]
struct LooseTreeReport {
    tree: Vec<TreeNode>,
    assign: BTreeMap<String, String>,
    ambient: String,
}

impl LooseTreeReport {
    fn new(lt: &LooseTree<'_>) -> Self {
        let inst = lt.instance();
        LooseTreeReport {
            tree: lt.nodes().to_vec(),
            assign: lt
                .assign()
                .iter()
                .map(|(t, m)| (t.key(), inst.id_in_fragment(m)))
                .collect(),
            ambient: inst.id_in_fragment(lt.ambient()),
        }
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    nodes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct FreeReport {
    free: bool,
    enumerations_checked: usize,
}

#[derive(Serialize)]
struct PrimeReport {
    prime: String,
    witness: WitnessSequence,
}

#[derive(Serialize)]
struct SwapReport {
    position: usize,
    before: WitnessSequence,
    after: WitnessSequence,
    basic: bool,
    refined: bool,
}

#[derive(Serialize)]
struct OmitReport {
    omitted: TreeNode,
    tree: LooseTreeReport,
    witness: WitnessSequence,
    basic: bool,
    refined: bool,
}

fn cmd_loose_tree(cli: &Cli, config: &Value, sub: &LooseCmd) -> Result<bool, CliError> {
    let cfg: LooseConfig = from_value(config)?;
    let inst = parse_instance(&cfg.instance)?;
    let inst = inst.as_ref();

    if let LooseCmd::Validate = sub {
        let report = match build_loose(&cfg, inst) {
            Ok(lt) => ValidateReport { valid: true, nodes: lt.nodes().len(), error: None },
            Err(CliError::Property(msg)) => ValidateReport { valid: false, nodes: cfg.tree.len(), error: Some(msg) },
            Err(e) => return Err(e),
        };
        emit(cli.out.as_deref(), &report)?;
        return Ok(report.valid);
    }

    let lt = build_loose(&cfg, inst)?;
    match sub {
        LooseCmd::Validate => unreachable!("handled above"),
        LooseCmd::Free => {
            let rep = check_free_all_enumerations(&lt, cli.bound).map_err(property)?;
            let report = FreeReport { free: rep.all_free(), enumerations_checked: rep.enumerations };
            emit(cli.out.as_deref(), &report)?;
            Ok(report.free)
        }
        LooseCmd::Prime => {
            let e = base_enumeration(&cfg, &lt)?;
            let w = witness_or_not_free(&lt, &e)?;
            let report = PrimeReport { prime: inst.id_in_fragment(w.last()), witness: w };
            emit(cli.out.as_deref(), &report)?;
            Ok(true)
        }
        LooseCmd::Swap => {
            let i = cfg.position.ok_or_else(|| config_err("swap needs \"position\""))?;
            let e = base_enumeration(&cfg, &lt)?;
            let before = witness_or_not_free(&lt, &e)?;
            let after = swap_transform(&lt, &before, i).map_err(property)?;
            let v = validate_witness(&lt, &after).map_err(property)?;
            let report = SwapReport { position: i, before, after, basic: v.basic, refined: v.refined };
            emit(cli.out.as_deref(), &report)?;
            Ok(report.basic && report.refined)
        }
        LooseCmd::Omit => {
            let r = cfg
                .omit
                .clone()
                .map(TreeNode::new)
                .ok_or_else(|| config_err("omit needs \"omit\" (a node path)"))?;
            let e = base_enumeration(&cfg, &lt)?;
            let w = witness_or_not_free(&lt, &e)?;
            let (smaller, w2) = omission_transform(&lt, &w, &r).map_err(property)?;
            let v = validate_witness(&smaller, &w2).map_err(property)?;
            let report = OmitReport {
                omitted: r,
                tree: LooseTreeReport::new(&smaller),
                witness: w2,
                basic: v.basic,
                refined: v.refined,
            };
            emit(cli.out.as_deref(), &report)?;
            Ok(report.basic && report.refined)
        }
        LooseCmd::QuotientCheck => {
            let members = cfg
                .ideal
                .as_deref()
                .ok_or_else(|| config_err("quotient-check needs \"ideal\""))?;
            let ideal = Ideal::new(lt.index(), nodes_of(members)).map_err(config_err)?;
            let report = quotient_check(&lt, &ideal, cli.bound).map_err(property)?;
            emit(cli.out.as_deref(), &report)?;
            Ok(report.quotient_free && report.quotient_agrees && report.extension_ok)
        }
        LooseCmd::Conclusion => {
            let report = check_conclusion(&lt, cli.bound).map_err(property)?;
            emit(cli.out.as_deref(), &report)?;
            Ok(report.holds())
        }
    }
}
