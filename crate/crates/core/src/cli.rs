//! Command-line front end: argument definitions and dispatch to the library.
//! Every command yields a JSON value and an aligned text rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::catalog::{self, VerifyOptions};
use crate::embed::{
    build_max_scheme, chi_scheme, evaluate_scheme, full_action_with, plain_morphism, type_action, Scheme, DEFAULT_COUNT, DEFAULT_GROWTH, DEFAULT_WINDOW,
};
use crate::gaps::{self, Budget, DenseProcedure, SearchOutcome, StandardGap};
use crate::tree::{self, Node, NodeSet};
use crate::types::{self, CountMethod, Frak, GapType, Mno};
use crate::witness;

/// Environment variable overriding the default growth parameter.
pub const GROWTH_ENV: &str = "GAPCALC_GROWTH";

#[derive(Debug, Parser)]
#[command(name = "gapcalc", version, about = "Types, tree embeddings and standard gaps in n-adic trees")]
pub struct Cli {
    /// Render aligned text instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate or count the types of n^{<ω}.
    #[command(subcommand)]
    Types(TypesCmd),
    /// Invariants and operators of single types.
    #[command(subcommand)]
    Type(TypeCmd),
    /// Meets, W-blocks, closures and equivalence of node families.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Sets of a given type: generation, inference and membership.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Evaluate schemes and their type actions.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// Standard gaps: validity, profiles, order and breaking searches, constructors.
    #[command(subcommand)]
    Gap(GapCmd),
    /// The lists of minimal 2-gaps and 3-gaps.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Type counts J(n).
    #[command(subcommand)]
    Jn(JnCmd),
    /// Bounds on the number of minimal n-gaps.
    Bounds {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum TypesCmd {
    List {
        #[arg(long)]
        n: usize,
    },
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "formula")]
        method: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum TypeCmd {
    Info { ty: String },
    Frak {
        #[arg(long)]
        kind: String,
        ty: String,
    },
    Compose { left: String, right: String },
    Matrix {
        ty: String,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TreeCmd {
    Meet {
        #[arg(long)]
        alphabet: usize,
        x: String,
        y: String,
    },
    Decompose {
        #[arg(long)]
        alphabet: usize,
        x: String,
    },
    Closure {
        #[arg(long)]
        alphabet: usize,
        nodes: Vec<String>,
    },
    Equiv {
        #[arg(long)]
        alphabet: usize,
        /// Comma-separated nodes of the first family.
        #[arg(long)]
        x: String,
        /// Comma-separated nodes of the second family.
        #[arg(long)]
        y: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum WitnessCmd {
    Generate {
        #[arg(long = "type")]
        ty: String,
        #[arg(long, default_value_t = DEFAULT_COUNT)]
        count: usize,
        #[arg(long)]
        growth: Option<usize>,
        #[arg(long, default_value = "")]
        stem: String,
        #[arg(long)]
        alphabet: Option<usize>,
    },
    Infer {
        #[arg(long)]
        alphabet: usize,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        nodes: Vec<String>,
    },
    Check {
        #[arg(long)]
        alphabet: usize,
        #[arg(long = "type")]
        ty: String,
        nodes: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Scheme JSON file.
    #[arg(long)]
    pub scheme: PathBuf,
    #[arg(long)]
    pub growth: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_COUNT)]
    pub count: usize,
}

#[derive(Debug, Subcommand)]
pub enum EmbedCmd {
    Eval {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long)]
        node: String,
    },
    Action {
        #[command(flatten)]
        s: SchemeArgs,
        #[arg(long = "type")]
        ty: String,
    },
    FullAction {
        #[command(flatten)]
        s: SchemeArgs,
    },
    /// Print a built-in scheme as JSON.
    #[command(subcommand)]
    Scheme(SchemeCmd),
}

#[derive(Debug, Subcommand)]
pub enum SchemeCmd {
    /// Letter `m` to `0 1^k`, other letters to `0^{k+1}`.
    Chi {
        #[arg(long)]
        m: usize,
    },
    /// `[i] ↦ τ_i` for types with nondecreasing maxima.
    Max {
        #[arg(long)]
        to: usize,
        taus: Vec<String>,
    },
    /// Morphism sending letter `i` to the i-th digit word.
    Morphism {
        #[arg(long)]
        to: usize,
        words: Vec<String>,
    },
}

#[derive(Debug, Args, Clone, Copy)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 3)]
    pub max_word_len: usize,
    #[arg(long, default_value_t = 2)]
    pub max_source: usize,
    #[arg(long)]
    pub no_pads: bool,
    #[arg(long)]
    pub no_builtins: bool,
}

impl BudgetArgs {
    pub fn budget(&self) -> Budget {
        Budget {
            max_word_len: self.max_word_len,
            max_source: self.max_source,
            pads: !self.no_pads,
            builtins: !self.no_builtins,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum GapCmd {
    Check { file: PathBuf },
    Profile { file: PathBuf },
    Leq {
        lower: PathBuf,
        upper: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    Break {
        file: PathBuf,
        /// Comma-separated ideal indices; omit to list breakable pairs.
        #[arg(long)]
        set: Option<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    #[command(subcommand)]
    Build(BuildCmd),
}

#[derive(Debug, Subcommand)]
pub enum BuildCmd {
    /// Σ^(A,B,ψ); ψ as `a:b=i` items separated by commas.
    Sigma {
        #[arg(long)]
        a: String,
        #[arg(long, default_value = "")]
        b: String,
        #[arg(long, default_value = "")]
        psi: String,
    },
    M {
        #[arg(long)]
        n: usize,
    },
    Mno {
        #[arg(long)]
        gap: PathBuf,
        #[arg(long)]
        kind: String,
    },
    /// Free gap; each `--ideal` is a JSON array of type strings.
    Free {
        #[arg(long)]
        m: usize,
        #[arg(long = "ideal")]
        ideals: Vec<String>,
    },
    Dense {
        #[arg(long)]
        gap: PathBuf,
        #[arg(long)]
        procedure: String,
    },
    Jk {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCmd {
    Verify {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Skip the breaking searches.
        #[arg(long)]
        no_breaking: bool,
    },
    Generate {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
    Show {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        id: Option<usize>,
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum JnCmd {
    Table {
        #[arg(long)]
        max: usize,
    },
}

/// Result of a command: machine output, text rendering and exit status.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub json: Value,
    pub table: String,
    /// False for domain failures (exit code 1).
    pub ok: bool,
}

impl Output {
    fn ok(json: Value, table: String) -> Self {
        Output { json, table, ok: true }
    }

    fn fail(json: Value, table: String) -> Self {
        Output { json, table, ok: false }
    }

    /// The text printed for the chosen format.
    pub fn render(&self, table: bool) -> String {
        if table {
            let mut s = self.table.clone();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        } else {
            serde_json::to_string_pretty(&self.json).expect("json renders") + "\n"
        }
    }
}

/// Growth from the flag, the environment, or the default.
pub fn growth_or_default(flag: Option<usize>) -> usize {
    flag.or_else(|| std::env::var(GROWTH_ENV).ok().and_then(|v| v.parse().ok())).unwrap_or(DEFAULT_GROWTH)
}

fn parse_type(s: &str) -> anyhow::Result<GapType> {
    s.parse().map_err(|e| anyhow!("{e}"))
}

fn read_gap(path: &PathBuf) -> anyhow::Result<StandardGap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    match value.get("gap") {
        Some(inner) => StandardGap::from_json(&inner.to_string()),
        None => StandardGap::from_json(&text),
    }
}

fn read_scheme(path: &PathBuf) -> anyhow::Result<Scheme> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Scheme::from_json(&text)
}

fn index_list(s: &str) -> anyhow::Result<Vec<usize>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|_| anyhow!("bad index `{x}`")))
        .collect()
}

fn type_info_json(t: &GapType) -> Value {
    json!({"type": t.to_string(), "profile": t.profile()})
}

/// Executes a parsed command.
pub fn execute(cli: &Cli) -> anyhow::Result<Output> {
    match &cli.command {
        Command::Types(c) => types_cmd(c),
        Command::Type(c) => type_cmd(c),
        Command::Tree(c) => tree_cmd(c),
        Command::Witness(c) => witness_cmd(c),
        Command::Embed(c) => embed_cmd(c),
        Command::Gap(c) => gap_cmd(c),
        Command::Catalog(c) => catalog_cmd(c),
        Command::Jn(JnCmd::Table { max }) => Ok(jn_table(*max)),
        Command::Bounds { n } => {
            let b = gaps::n_bounds(*n)?;
            let table = format!(
                "n = {}\nlower = 2^{} = {}\nupper = {}^{} = {}\n",
                b.n,
                b.lower_exponent,
                b.lower.clone().unwrap_or_else(|| format!("1/2^{}", -b.lower_exponent)),
                b.n,
                b.upper_exponent,
                b.upper
            );
            Ok(Output::ok(serde_json::to_value(&b)?, table))
        }
    }
}

fn types_cmd(c: &TypesCmd) -> anyhow::Result<Output> {
    match c {
        TypesCmd::List { n } => {
            let list = types::enumerate_types(*n)?;
            let table = list.iter().map(|t| format!("{t}\n")).collect();
            Ok(Output::ok(json!(list), table))
        }
        TypesCmd::Count { n, method } => {
            let m: CountMethod = method.parse()?;
            let count = types::count_types(*n, m)?;
            Ok(Output::ok(json!({"n": n, "method": method.to_lowercase(), "count": count.to_string()}), format!("{count}\n")))
        }
    }
}

fn type_cmd(c: &TypeCmd) -> anyhow::Result<Output> {
    match c {
        TypeCmd::Info { ty } => {
            let t = parse_type(ty)?;
            let p = t.profile();
            let strength: String = p.strength.iter().map(|x| x.to_string()).collect();
            let table = format!(
                "{:<24} {:<8} {:<8} {:<6} {}\n",
                t.to_string(),
                strength,
                format!("{:?}", p.class).to_uppercase(),
                if p.top_comb { "yes" } else { "no" },
                p.max
            );
            Ok(Output::ok(type_info_json(&t), table))
        }
        TypeCmd::Frak { kind, ty } => {
            let t = parse_type(ty)?;
            let k: Frak = kind.parse()?;
            let r = types::frak(k, &t)?;
            Ok(Output::ok(json!({"kind": kind.to_uppercase(), "type": t, "result": r}), format!("{r}\n")))
        }
        TypeCmd::Compose { left, right } => {
            let (a, b) = (parse_type(left)?, parse_type(right)?);
            let r = types::compose_chains(&a, &b)?;
            Ok(Output::ok(json!({"left": a, "right": b, "result": r}), format!("{r}\n")))
        }
        TypeCmd::Matrix { ty, n } => {
            let t = parse_type(ty)?;
            let n = n.unwrap_or(GapType::max(&t) + 1);
            let m = types::type_to_matrix(&t, n)?;
            let table = m.iter().map(|row| row.iter().map(|x| format!("{x:>3}")).collect::<String>() + "\n").collect();
            Ok(Output::ok(json!({"type": t, "n": n, "matrix": m}), table))
        }
    }
}

fn node_list(alphabet: usize, items: &[String]) -> anyhow::Result<Vec<Node>> {
    items.iter().map(|s| Node::parse(s, alphabet).map_err(|e| anyhow!("{e}"))).collect()
}

fn comma_nodes(alphabet: usize, s: &str) -> anyhow::Result<NodeSet> {
    let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).collect();
    Ok(NodeSet::new(alphabet, node_list(alphabet, &items)?)?)
}

fn tree_cmd(c: &TreeCmd) -> anyhow::Result<Output> {
    match c {
        TreeCmd::Meet { alphabet, x, y } => {
            let (a, b) = (Node::parse(x, *alphabet)?, Node::parse(y, *alphabet)?);
            let m = tree::meet(&a, &b)?;
            let before = tree::precedes(&a, &b)?;
            Ok(Output::ok(json!({"meet": m, "precedes": before}), format!("{m}\n")))
        }
        TreeCmd::Decompose { alphabet, x } => {
            let blocks = tree::block_decompose(&Node::parse(x, *alphabet)?)?;
            let table = blocks.iter().map(|b| format!("{} {}\n", b.head, b.word)).collect();
            Ok(Output::ok(serde_json::to_value(&blocks)?, table))
        }
        TreeCmd::Closure { alphabet, nodes } => {
            let set = NodeSet::new(*alphabet, node_list(*alphabet, nodes)?)?;
            let cl = tree::closure(&set);
            let table = cl.sorted().iter().map(|n| format!("{n}\n")).collect();
            Ok(Output::ok(json!({"closure": cl.to_json(), "closed": tree::is_closed(&set)}), table))
        }
        TreeCmd::Equiv { alphabet, x, y } => {
            let (a, b) = (comma_nodes(*alphabet, x)?, comma_nodes(*alphabet, y)?);
            let witness = tree::equivalence_witness(&a, &b);
            let quads = tree::equivalent_by_quadruples(&a, &b).unwrap_or(false);
            let pairs: Option<Vec<(String, String)>> =
                witness.as_ref().map(|w| w.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect());
            Ok(Output::ok(
                json!({"equivalent": witness.is_some(), "by_quadruples": quads, "bijection": pairs}),
                format!("equivalent: {}\nby quadruples: {quads}\n", witness.is_some()),
            ))
        }
    }
}

fn witness_cmd(c: &WitnessCmd) -> anyhow::Result<Output> {
    match c {
        WitnessCmd::Generate { ty, count, growth, stem, alphabet } => {
            let t = parse_type(ty)?;
            let alphabet = alphabet.unwrap_or(GapType::max(&t) + 1);
            let stem = Node::parse(stem, alphabet)?;
            let set = witness::generate_set(&t, *count, growth_or_default(*growth), &stem)?;
            let table = set.nodes.iter().map(|n| format!("{n}\n")).collect();
            Ok(Output::ok(serde_json::to_value(&set)?, table))
        }
        WitnessCmd::Infer { alphabet, window, nodes } => {
            let xs = node_list(*alphabet, nodes)?;
            match witness::infer_type(&xs, *window) {
                Ok(t) => Ok(Output::ok(json!({"type": t}), format!("{t}\n"))),
                Err(e) => Ok(Output::fail(json!({"error": e.to_string()}), format!("{e}\n"))),
            }
        }
        WitnessCmd::Check { alphabet, ty, nodes } => {
            let t = parse_type(ty)?;
            let xs = node_list(*alphabet, nodes)?;
            let ok = witness::check_typed_set(&xs, &t)?;
            Ok(Output { json: json!({"type": t, "member": ok}), table: format!("{ok}\n"), ok })
        }
    }
}

fn embed_cmd(c: &EmbedCmd) -> anyhow::Result<Output> {
    match c {
        EmbedCmd::Eval { s, node } => {
            let scheme = read_scheme(&s.scheme)?;
            let x = Node::parse(node, scheme.from)?;
            let w = evaluate_scheme(&scheme, &x, growth_or_default(s.growth))?;
            Ok(Output::ok(json!({"node": x, "image": w.to_string(), "length": w.len().to_string()}), format!("{w}\n")))
        }
        EmbedCmd::Action { s, ty } => {
            let scheme = read_scheme(&s.scheme)?;
            let t = parse_type(ty)?;
            match type_action(&scheme, &t, s.count, growth_or_default(s.growth)) {
                Ok(img) => Ok(Output::ok(json!({"type": t, "image": img}), format!("{t} -> {img}\n"))),
                Err(e) => Ok(Output::fail(json!({"type": t, "status": "UNSTABLE", "error": e.to_string()}), format!("{e}\n"))),
            }
        }
        EmbedCmd::FullAction { s } => {
            let scheme = read_scheme(&s.scheme)?;
            match full_action_with(&scheme, s.count, growth_or_default(s.growth)) {
                Ok(map) => Ok(Output::ok(map.to_json(), map.to_string())),
                Err(e) => Ok(Output::fail(json!({"status": "UNSTABLE", "error": e.to_string()}), format!("{e}\n"))),
            }
        }
        EmbedCmd::Scheme(c) => {
            let scheme = match c {
                SchemeCmd::Chi { m } => chi_scheme(*m),
                SchemeCmd::Max { to, taus } => {
                    let ts = taus.iter().map(|t| parse_type(t)).collect::<anyhow::Result<Vec<_>>>()?;
                    build_max_scheme(&ts, *to)?
                }
                SchemeCmd::Morphism { to, words } => {
                    let ws = words
                        .iter()
                        .map(|w| {
                            w.chars()
                                .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| anyhow!("bad letter `{c}`")))
                                .collect::<anyhow::Result<Vec<_>>>()
                        })
                        .collect::<anyhow::Result<Vec<_>>>()?;
                    plain_morphism(*to, &ws)?
                }
            };
            let text = serde_json::to_string_pretty(&scheme)? + "\n";
            Ok(Output::ok(serde_json::to_value(&scheme)?, text))
        }
    }
}

fn gap_table(g: &StandardGap) -> String {
    g.ideals
        .iter()
        .enumerate()
        .map(|(i, s)| format!("S{i}: {}\n", s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")))
        .collect()
}

fn gap_cmd(c: &GapCmd) -> anyhow::Result<Output> {
    match c {
        GapCmd::Check { file } => {
            let g = read_gap(file)?;
            let r = gaps::validate_gap(&g);
            let table = format!("valid: {}\nstandard: {}\nproblems: {}\n", r.valid, r.standard, r.problems.len());
            Ok(Output { json: serde_json::to_value(&r)?, table, ok: r.valid })
        }
        GapCmd::Profile { file } => {
            let g = read_gap(file)?;
            let p = gaps::gap_profile(&g);
            let table = format!("dense: {}\nstrong: {}\n", p.dense, p.strong);
            Ok(Output::ok(serde_json::to_value(&p)?, table))
        }
        GapCmd::Leq { lower, upper, budget } => {
            let (a, b) = (read_gap(lower)?, read_gap(upper)?);
            let outcome = match gaps::search_leq(&a, &b, &budget.budget()) {
                Some(c) => SearchOutcome::Found(c),
                None => SearchOutcome::NotFoundWithinBudget,
            };
            Ok(Output::ok(outcome.to_json(), outcome_table(&outcome)))
        }
        GapCmd::Break { file, set, budget } => {
            let g = read_gap(file)?;
            match set {
                Some(s) => {
                    let b: BTreeSet<usize> = index_list(s)?.into_iter().collect();
                    let outcome = gaps::break_search(&g, &b, &budget.budget());
                    Ok(Output::ok(outcome.to_json(), outcome_table(&outcome)))
                }
                None => {
                    let found = gaps::breakable_pairs(&g, &budget.budget());
                    let json: Vec<Value> =
                        found.iter().map(|((i, j), c)| json!({"pair": [i, j], "witness": c.to_json()})).collect();
                    let table = found.iter().map(|((i, j), c)| format!("{{{i},{j}}}  {}\n", c.label)).collect();
                    Ok(Output::ok(json!(json), table))
                }
            }
        }
        GapCmd::Build(b) => {
            let g = build_cmd(b)?;
            Ok(Output::ok(g.to_json(), gap_table(&g)))
        }
    }
}

fn outcome_table(o: &SearchOutcome) -> String {
    match o {
        SearchOutcome::Found(c) => format!("FOUND {}\n{}", c.label, c.map),
        SearchOutcome::NotFoundWithinBudget => "NOT_FOUND_WITHIN_BUDGET\n".to_string(),
    }
}

fn build_cmd(b: &BuildCmd) -> anyhow::Result<StandardGap> {
    Ok(match b {
        BuildCmd::Sigma { a, b, psi } => {
            let mut map = BTreeMap::new();
            for item in psi.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                let (pair, value) = item.split_once('=').ok_or_else(|| anyhow!("psi item `{item}` needs `=`"))?;
                let (x, y) = pair.split_once(':').ok_or_else(|| anyhow!("psi item `{item}` needs `:`"))?;
                map.insert((x.trim().parse()?, y.trim().parse()?), value.trim().parse()?);
            }
            gaps::build_sigma(&index_list(a)?, &index_list(b)?, &map)?
        }
        BuildCmd::M { n } => gaps::build_m_gap(*n)?,
        BuildCmd::Mno { gap, kind } => {
            let k: Mno = kind.parse()?;
            gaps::extend_mno(&read_gap(gap)?, k)
        }
        BuildCmd::Free { m, ideals } => {
            let rest = ideals
                .iter()
                .map(|s| serde_json::from_str::<Vec<GapType>>(s).with_context(|| format!("parsing ideal {s}")))
                .collect::<anyhow::Result<Vec<_>>>()?;
            gaps::build_free_gap(*m, &rest)?
        }
        BuildCmd::Dense { gap, procedure } => {
            let p: DenseProcedure = procedure.parse()?;
            gaps::build_dense_extension(&read_gap(gap)?, p)?
        }
        BuildCmd::Jk { k } => gaps::build_jk_gap(*k)?,
    })
}

fn catalog_cmd(c: &CatalogCmd) -> anyhow::Result<Output> {
    let dir_or = |d: &Option<PathBuf>| d.clone().unwrap_or_else(catalog::default_dir);
    match c {
        CatalogCmd::Verify { dir, no_breaking } => {
            let opts = VerifyOptions { breaking: !no_breaking, ..VerifyOptions::default() };
            let r = catalog::verify_catalog(&dir_or(dir), &opts)?;
            Ok(Output { json: serde_json::to_value(&r)?, table: r.to_table(), ok: r.all_pass() })
        }
        CatalogCmd::Generate { dir } => {
            let m = catalog::write_catalog(&dir_or(dir))?;
            Ok(Output::ok(serde_json::to_value(&m)?, format!("{m:?}\n")))
        }
        CatalogCmd::Show { dim, id, dir } => {
            let cat = catalog::load_catalog(&dir_or(dir), *dim)?;
            let entries: Vec<&catalog::CatalogEntry> = match id {
                Some(i) => vec![catalog::entry(&cat, *i)?],
                None => cat.entries.iter().collect(),
            };
            let table = entries
                .iter()
                .map(|e| {
                    let cells: Vec<String> = e
                        .gap
                        .ideals
                        .iter()
                        .map(|s| s.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","))
                        .collect();
                    format!("{:>3} ({}) | {}\n", e.id, e.perm_count, cells.join(" | "))
                })
                .collect();
            Ok(Output::ok(serde_json::to_value(&entries)?, table))
        }
    }
}

fn jn_table(max: usize) -> Output {
    let rows: Vec<Value> = (1..=max)
        .map(|n| json!({"n": n, "count": types::count_formula(n).to_string(), "ratio": types::asymptotic_ratio(n)}))
        .collect();
    let table = (1..=max)
        .map(|n| format!("{n:>3}  {:>24}  {:.6}\n", types::count_formula(n).to_string(), types::asymptotic_ratio(n)))
        .collect();
    Output::ok(json!(rows), table)
}

/// Parses `args`, runs the command and returns `(exit code, stdout, stderr)`.
pub fn run<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (0, text, String::new()) } else { (2, String::new(), text) };
        }
    };
    if let Some(j) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    match execute(&cli) {
        Ok(out) => (if out.ok { 0 } else { 1 }, out.render(cli.table), String::new()),
        Err(e) => (1, String::new(), format!("error: {e:#}\n")),
    }
}
