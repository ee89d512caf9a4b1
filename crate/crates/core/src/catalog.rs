//! Machine-readable lists of the minimal 2-gaps and 3-gaps, their generator,
//! and a verification suite tying the lists to the gap calculus.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use crate::gaps::{
    admissible_violations, break_search, breakable_pairs, build_dense_extension, build_sigma, extend_mno,
    free_family, gap_profile, ideals_met, pairs_share_index, permutations, permute_gap, validate_gap, Budget,
    DenseProcedure, SearchOutcome, StandardGap,
};
use crate::types::{enumerate_types, GapType, Mno};

/// Flags a list entry is known to carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedFlags {
    pub strong: bool,
    pub dense: bool,
}

/// One gap of a list, with the number of its nonequivalent permutations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: usize,
    /// Label of the table row the entry expands.
    pub row: String,
    pub gap: StandardGap,
    pub perm_count: usize,
    pub expected: ExpectedFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Counts recorded next to the data files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub counts: BTreeMap<String, usize>,
    /// Sums of the per-row permutation counts.
    pub permutation_totals: BTreeMap<String, usize>,
    /// Totals stated in the prose accompanying the lists.
    pub stated_permutation_totals: BTreeMap<String, usize>,
}

/// A loaded list; entries failing validation are kept and named.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub dimension: usize,
    pub entries: Vec<CatalogEntry>,
    pub invalid: Vec<(usize, String)>,
}

impl Catalog {
    pub fn get(&self, id: usize) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn gap(&self, id: usize) -> &StandardGap {
        &self.get(id).expect("catalog id").gap
    }
}

/// The data directory shipped with the crate.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog")
}

fn ty(s: &str) -> GapType {
    s.parse().expect("literal type")
}

fn tys(list: &[&str]) -> Vec<GapType> {
    list.iter().map(|s| ty(s)).collect()
}

/// The five minimal 2-gaps as rows of the 2-gap table.
fn two_gap_rows() -> Vec<Vec<Vec<GapType>>> {
    let max_one: Vec<GapType> =
        enumerate_types(2).expect("alphabet 2").into_iter().filter(|t| GapType::max(t) == 1).collect();
    vec![
        vec![tys(&["[0]"]), max_one],
        vec![tys(&["[0]"]), tys(&["[1]"])],
        vec![tys(&["[0]"]), tys(&["[1]", "[01]"])],
        vec![tys(&["[0]", "[01]"]), tys(&["[1]"])],
        vec![tys(&["[0]"]), tys(&["[1]", "[01]", "[^1 _0 _1]"])],
    ]
}

/// Nonempty subsets of `pool` by bitmask over its order.
fn nonempty_subsets(pool: &[GapType]) -> Vec<Vec<GapType>> {
    all_subsets(pool).into_iter().skip(1).collect()
}

/// All subsets of `pool` by bitmask over its order.
fn all_subsets(pool: &[GapType]) -> Vec<Vec<GapType>> {
    (0u32..1 << pool.len())
        .map(|mask| pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()).collect())
        .collect()
}

fn remaining(m: usize, used: &[Vec<GapType>]) -> Vec<GapType> {
    enumerate_types(m).expect("positive alphabet").into_iter().filter(|t| !used.iter().any(|s| s.contains(t))).collect()
}

struct Row {
    label: &'static str,
    ambient: usize,
    ideals: Vec<Vec<GapType>>,
    perm_count: usize,
    note: Option<String>,
}

fn lift(two: &[Vec<GapType>], third: Vec<GapType>) -> Vec<Vec<GapType>> {
    let mut out = two.to_vec();
    out.push(third);
    out
}

/// Expands the rows of the 3-gap tables into 163 explicit gaps.
fn three_gap_rows() -> Vec<Row> {
    let g = two_gap_rows();
    let gperm = [6, 6, 6, 3, 6];
    let mut rows = Vec::new();
    let plain = |label: &'static str, ambient: usize, ideals: Vec<Vec<GapType>>, perm_count: usize| Row {
        label,
        ambient,
        ideals,
        perm_count,
        note: None,
    };
    let base = vec![tys(&["[0]"]), tys(&["[1]"])];
    for a in nonempty_subsets(&remaining(2, &base)) {
        rows.push(plain("1-63", 2, lift(&base, a), 6));
    }
    let base = vec![tys(&["[0]"]), tys(&["[1]", "[01]"])];
    for a in nonempty_subsets(&remaining(2, &base)) {
        rows.push(plain("64-94", 2, lift(&base, a), 6));
    }
    let base = vec![tys(&["[0]"]), tys(&["[1]", "[01]", "[^1 _0 _1]"])];
    let (p, q) = (ty("[^0 _1]"), ty("[_0 ^1 _1]"));
    let conforming: Vec<Vec<GapType>> =
        all_subsets(&remaining(2, &base)).into_iter().filter(|a| a.contains(&p) == a.contains(&q)).collect();
    let (empty, nonempty): (Vec<_>, Vec<_>) = conforming.into_iter().partition(|a| a.is_empty());
    for a in nonempty.into_iter().chain(empty) {
        let mut row = plain("95-102", 2, lift(&base, a.clone()), 6);
        if a.is_empty() {
            row.note = Some("the eighth set satisfying the side condition is empty".into());
        }
        rows.push(row);
    }
    rows.push(plain(
        "103",
        2,
        vec![tys(&["[0]", "[01]"]), tys(&["[1]"]), tys(&["[^1 _0]", "[^0 _1]", "[^0 ^1 _1]", "[_0 ^1 _1]", "[^1 _0 _1]"])],
        3,
    ));
    rows.push(plain("104", 2, vec![tys(&["[0]", "[01]"]), tys(&["[1]"]), tys(&["[^0 _1]", "[^0 ^1 _1]"])], 3));
    for (label, kind) in [("105-109", Mno::M), ("110-114", Mno::N), ("115-119", Mno::O)] {
        let third = crate::types::type_set_mno(kind, 2);
        for (i, two) in g.iter().enumerate() {
            rows.push(plain(label, 3, lift(two, third.clone()), gperm[i]));
        }
    }
    for (i, two) in g.iter().enumerate() {
        rows.push(plain("120-124", 3, lift(two, tys(&["[2]"])), gperm[i]));
    }
    for i in [1, 2, 3] {
        rows.push(plain("125-127", 3, lift(&g[i], tys(&["[2]", "[02]", "[012]", "[12]"])), gperm[i]));
    }
    for i in [0, 1, 2, 4] {
        rows.push(plain("128-131", 3, lift(&g[i], tys(&["[2]", "[02]"])), gperm[i]));
    }
    for i in [1, 3] {
        rows.push(plain("132-133", 3, lift(&g[i], tys(&["[2]", "[12]"])), 6));
    }
    rows.push(plain("134", 3, lift(&g[1], tys(&["[2]", "[02]", "[012]"])), 6));
    let pair = tys(&["[^0 _2]", "[_1 ^0 _2]"]);
    let single = tys(&["[^0 _1 _2]"]);
    let variants: [(&'static str, &'static str, bool, bool); 3] =
        [("135-138", "147-148", true, true), ("139-142", "149-150", true, false), ("143-146", "151-152", false, true)];
    let chains = tys(&["[12]", "[012]"]);
    for (label, _, with_pair, with_single) in variants {
        for sub in all_subsets(&chains) {
            let mut third = tys(&["[2]", "[02]"]);
            third.extend(sub);
            if with_pair {
                third.extend(pair.clone());
            }
            if with_single {
                third.extend(single.clone());
            }
            rows.push(plain(label, 3, lift(&g[1], third), 6));
        }
    }
    for (_, label, with_pair, with_single) in variants {
        for sub in [Vec::new(), chains.clone()] {
            let mut third = tys(&["[2]", "[02]"]);
            third.extend(sub);
            if with_pair {
                third.extend(pair.clone());
            }
            if with_single {
                third.extend(single.clone());
            }
            rows.push(plain(label, 3, lift(&g[2], third), 6));
        }
    }
    for i in [0, 1, 2, 4] {
        rows.push(plain("153-156", 3, lift(&g[i], tys(&["[2]", "[02]", "[^0 _2]"])), 6));
    }
    let last: [(&'static str, [&[&str]; 3], usize); 7] = [
        ("157", [&["[0]"], &["[1]", "[01]", "[12]", "[012]"], &["[2]"]], 6),
        ("158", [&["[0]"], &["[1]", "[01]", "[12]", "[012]"], &["[2]", "[02]"]], 3),
        ("159", [&["[0]"], &["[1]", "[12]"], &["[2]"]], 3),
        (
            "160",
            [
                &["[0]"],
                &["[1]", "[01]", "[^0 _1]", "[12]", "[012]", "[^0 _1 _2]", "[_1 ^0 _2]"],
                &["[2]", "[02]", "[^0 _2]"],
            ],
            3,
        ),
        ("161", [&["[0]"], &["[1]", "[12]"], &["[2]", "[02]", "[^0 _2]"]], 6),
        ("162", [&["[0]"], &["[1]", "[01]", "[12]", "[012]"], &["[2]", "[02]", "[^0 _2]"]], 6),
        ("163", [&["[0]", "[01]", "[012]", "[02]"], &["[1]", "[12]"], &["[2]"]], 1),
    ];
    for (label, ideals, count) in last {
        rows.push(plain(label, 3, ideals.iter().map(|s| tys(s)).collect(), count));
    }
    rows
}

/// Entries of the lists: dimension 2 gives 5 gaps, dimension 3 gives 163.
pub fn generate(dimension: usize) -> anyhow::Result<Vec<CatalogEntry>> {
    match dimension {
        2 => Ok(two_gap_rows()
            .into_iter()
            .enumerate()
            .map(|(i, ideals)| CatalogEntry {
                id: i + 1,
                row: (i + 1).to_string(),
                gap: StandardGap::new(2, ideals).named(&format!("Γ{}", i + 1)),
                perm_count: if i == 3 { 1 } else { 2 },
                expected: ExpectedFlags { strong: i == 3, dense: i == 0 },
                note: None,
            })
            .collect()),
        3 => {
            // Dense entries: the orthogonal extensions of Γ2, Γ3, Γ5, Γ4 and the
            // M-extension of Γ1.
            let dense: BTreeSet<usize> = [63, 94, 101, 103, 105].into_iter().collect();
            let strong: BTreeSet<usize> = [103, 104, 163].into_iter().collect();
            Ok(three_gap_rows()
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let id = i + 1;
                    CatalogEntry {
                        id,
                        row: r.label.to_string(),
                        gap: StandardGap::new(r.ambient, r.ideals).named(&format!("Δ{id}")),
                        perm_count: r.perm_count,
                        expected: ExpectedFlags { strong: strong.contains(&id), dense: dense.contains(&id) },
                        note: r.note,
                    }
                })
                .collect())
        }
        d => bail!("no list for dimension {d}"),
    }
}

/// Permutation totals stated in the prose.
pub const STATED_TOTALS: [(usize, usize); 2] = [(2, 9), (3, 933)];

/// Writes the data files and the manifest under `dir`.
pub fn write_catalog(dir: &Path) -> anyhow::Result<Manifest> {
    let mut manifest =
        Manifest { counts: BTreeMap::new(), permutation_totals: BTreeMap::new(), stated_permutation_totals: BTreeMap::new() };
    for (dimension, stated) in STATED_TOTALS {
        let entries = generate(dimension)?;
        let sub = dir.join(dimension.to_string());
        fs::create_dir_all(&sub)?;
        for e in &entries {
            let text = serde_json::to_string_pretty(e)? + "\n";
            fs::write(sub.join(format!("{:03}.json", e.id)), text)?;
        }
        let key = dimension.to_string();
        manifest.counts.insert(key.clone(), entries.len());
        manifest.permutation_totals.insert(key.clone(), entries.iter().map(|e| e.perm_count).sum());
        manifest.stated_permutation_totals.insert(key, stated);
    }
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn load_manifest(dir: &Path) -> anyhow::Result<Manifest> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads a list from `dir/<dimension>/*.json`; parse errors name the file,
/// validation failures are recorded per entry.
pub fn load_catalog(dir: &Path, dimension: usize) -> anyhow::Result<Catalog> {
    let sub = dir.join(dimension.to_string());
    let mut files: Vec<PathBuf> = fs::read_dir(&sub)
        .with_context(|| format!("reading {}", sub.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut entries = Vec::with_capacity(files.len());
    let mut invalid = Vec::new();
    let mut ids = BTreeSet::new();
    for path in files {
        let text = fs::read_to_string(&path)?;
        let mut e: CatalogEntry =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let (name, perm) = (e.gap.name.clone(), e.gap.perm_count);
        e.gap = StandardGap { name, perm_count: perm, ..StandardGap::new(e.gap.ambient, e.gap.ideals.clone()) };
        if !ids.insert(e.id) {
            bail!("duplicate id {} in {}", e.id, path.display());
        }
        if e.gap.ambient > 3 || e.gap.arity() != dimension {
            bail!("entry {} has ambient {} and arity {}", e.id, e.gap.ambient, e.gap.arity());
        }
        let report = validate_gap(&e.gap);
        if !report.valid {
            invalid.push((e.id, serde_json::to_string(&report.problems)?));
        }
        entries.push(e);
    }
    entries.sort_by_key(|e| e.id);
    Ok(Catalog { dimension, entries, invalid })
}

/// One checked fact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fact {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// All facts checked by [`verify_catalog`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub facts: Vec<Fact>,
}

impl VerifyReport {
    fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.facts.push(Fact { name: name.to_string(), pass, detail: detail.into() });
    }

    pub fn all_pass(&self) -> bool {
        self.facts.iter().all(|f| f.pass)
    }

    pub fn fact(&self, name: &str) -> Option<&Fact> {
        self.facts.iter().find(|f| f.name == name)
    }

    /// Aligned text, one fact per line.
    pub fn to_table(&self) -> String {
        let width = self.facts.iter().map(|f| f.name.len()).max().unwrap_or(0);
        self.facts
            .iter()
            .map(|f| format!("{:<4} {:<width$}  {}\n", if f.pass { "PASS" } else { "FAIL" }, f.name, f.detail))
            .collect()
    }
}

fn id_list(ids: impl IntoIterator<Item = usize>) -> String {
    let v: Vec<String> = ids.into_iter().map(|i| i.to_string()).collect();
    format!("[{}]", v.join(","))
}

/// True iff some permutation of `g` carries the same ideals as `target`.
pub fn equal_up_to_permutation(g: &StandardGap, target: &StandardGap) -> bool {
    permutations(g.arity())
        .iter()
        .any(|e| permute_gap(g, e).map(|p| p.same_ideals(target)).unwrap_or(false))
}

/// Which checks [`verify_catalog`] runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub breaking: bool,
    pub budget: Budget,
    /// Budget for breaking gaps over three letters.
    pub budget3: Budget,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { breaking: true, budget: Budget::default(), budget3: Budget::default() }
    }
}

/// Runs the list checks: sizes, totals, validity, strong and dense sets,
/// constructor cross-checks, and the breaking facts.
pub fn verify_catalog(dir: &Path, opts: &VerifyOptions) -> anyhow::Result<VerifyReport> {
    let two = load_catalog(dir, 2)?;
    let three = load_catalog(dir, 3)?;
    let manifest = load_manifest(dir)?;
    let mut r = VerifyReport::default();
    r.push("2-gap count", two.entries.len() == 5, format!("{} entries", two.entries.len()));
    r.push("3-gap count", three.entries.len() == 163, format!("{} entries", three.entries.len()));
    for (cat, stated) in [(&two, 9usize), (&three, 933usize)] {
        let total: usize = cat.entries.iter().map(|e| e.perm_count).sum();
        r.push(&format!("{}-gap permutation total", cat.dimension), total == stated, format!("sum {total}, stated {stated}"));
        let key = cat.dimension.to_string();
        let consistent = manifest.counts.get(&key) == Some(&cat.entries.len())
            && manifest.permutation_totals.get(&key) == Some(&total);
        r.push(&format!("{}-gap manifest agrees", cat.dimension), consistent, format!("{:?}", manifest.counts.get(&key)));
        r.push(
            &format!("{}-gap entries validate", cat.dimension),
            cat.invalid.is_empty(),
            if cat.invalid.is_empty() {
                "all valid".to_string()
            } else {
                cat.invalid.iter().map(|(id, p)| format!("{id}: {p}")).collect::<Vec<_>>().join("; ")
            },
        );
    }
    let perms: Vec<usize> = two.entries.iter().map(|e| e.perm_count).collect();
    r.push("2-gap permutation counts", perms == vec![2, 2, 2, 1, 2], format!("{perms:?}"));
    for (cat, expect) in [(&two, vec![4]), (&three, vec![103, 104, 163])] {
        let strong: Vec<usize> = cat.entries.iter().filter(|e| gap_profile(&e.gap).strong).map(|e| e.id).collect();
        let flagged: Vec<usize> = cat.entries.iter().filter(|e| e.expected.strong).map(|e| e.id).collect();
        r.push(
            &format!("{}-gap strong set", cat.dimension),
            strong == expect && flagged == expect,
            format!("computed {}, flagged {}", id_list(strong), id_list(flagged)),
        );
        let dense: Vec<usize> = cat.entries.iter().filter(|e| gap_profile(&e.gap).dense).map(|e| e.id).collect();
        let flagged: Vec<usize> = cat.entries.iter().filter(|e| e.expected.dense).map(|e| e.id).collect();
        r.push(
            &format!("{}-gap dense set", cat.dimension),
            dense == flagged,
            format!("computed {}, flagged {}", id_list(dense), id_list(flagged)),
        );
    }
    let family = free_family(2)?;
    let free_ok = family.len() == 63 && (1..=63).all(|id| three.gap(id).same_ideals(&family[id - 1]));
    r.push("entries 1-63 = free family", free_ok, format!("{} constructed", family.len()));
    let mut mno_bad = Vec::new();
    for (start, kind) in [(105, Mno::M), (110, Mno::N), (115, Mno::O)] {
        for i in 0..5 {
            if !three.gap(start + i).same_ideals(&extend_mno(two.gap(i + 1), kind)) {
                mno_bad.push(start + i);
            }
        }
    }
    r.push("entries 105-119 = MNO extensions", mno_bad.is_empty(), format!("mismatches {}", id_list(mno_bad)));
    let psi_all: BTreeMap<(usize, usize), usize> = [((0, 1), 2), ((1, 0), 2)].into_iter().collect();
    let psi_one: BTreeMap<(usize, usize), usize> = [((1, 0), 2)].into_iter().collect();
    let sigmas = [
        (103, build_sigma(&[0, 1], &[2], &psi_all)?),
        (104, build_sigma(&[0, 1], &[2], &psi_one)?),
        (163, build_sigma(&[0, 1, 2], &[], &BTreeMap::new())?),
    ];
    let sigma_bad: Vec<usize> =
        sigmas.iter().filter(|(id, s)| !equal_up_to_permutation(s, three.gap(*id))).map(|(id, _)| *id).collect();
    r.push("entries 103,104,163 = strong constructions", sigma_bad.is_empty(), format!("mismatches {}", id_list(sigma_bad)));
    let mut dense_built = Vec::new();
    for e in &two.entries {
        let procedure = if gap_profile(&e.gap).dense { DenseProcedure::M } else { DenseProcedure::Ortho };
        let built = build_dense_extension(&e.gap, procedure)?;
        let ids: Vec<usize> =
            three.entries.iter().filter(|t| equal_up_to_permutation(&built, &t.gap)).map(|t| t.id).collect();
        dense_built.extend(ids);
    }
    dense_built.sort();
    let flagged: Vec<usize> = three.entries.iter().filter(|e| e.expected.dense).map(|e| e.id).collect();
    r.push(
        "dense 3-gaps = dense extensions of 2-gaps",
        dense_built == flagged,
        format!("constructed {}, flagged {}", id_list(dense_built), id_list(flagged)),
    );
    if opts.breaking {
        breaking_facts(&three, opts, &mut r);
    }
    Ok(r)
}

fn budget_for(g: &StandardGap, opts: &VerifyOptions) -> Budget {
    if g.ambient >= 3 {
        opts.budget3
    } else {
        opts.budget
    }
}

fn breaking_facts(three: &Catalog, opts: &VerifyOptions, r: &mut VerifyReport) {
    let mut lacking = Vec::new();
    let mut unsound = Vec::new();
    let mut inadmissible = Vec::new();
    for e in &three.entries {
        let budget = budget_for(&e.gap, opts);
        let found = breakable_pairs(&e.gap, &budget);
        let pairs: BTreeSet<(usize, usize)> = found.keys().copied().collect();
        if !pairs_share_index(&pairs) {
            lacking.push(e.id);
        }
        for ((i, j), c) in &found {
            if ideals_met(&c.map, &e.gap) != [*i, *j].into_iter().collect() {
                unsound.push(e.id);
            }
            if !admissible_violations(&c.map).is_empty() {
                inadmissible.push(format!("{}:{}", e.id, c.label));
            }
        }
    }
    r.push(
        "every 3-gap has two breakable pairs sharing an index",
        lacking.is_empty(),
        format!("lacking {}", id_list(lacking)),
    );
    r.push("break witnesses are sound", unsound.is_empty(), format!("unsound {}", id_list(unsound)));
    r.push(
        "break witnesses pass admissibility filters",
        inadmissible.is_empty(),
        if inadmissible.is_empty() { "all pass".to_string() } else { inadmissible.join("; ") },
    );
    let zero_one: BTreeSet<usize> = [0, 1].into_iter().collect();
    let broken: Vec<usize> = three
        .entries
        .iter()
        .filter(|e| e.id <= 104)
        .filter(|e| matches!(break_search(&e.gap, &zero_one, &budget_for(&e.gap, opts)), SearchOutcome::Found(_)))
        .map(|e| e.id)
        .collect();
    r.push(
        "entries 1-104 not {0,1}-broken within budget",
        broken.is_empty(),
        format!("found witnesses for {}", id_list(broken)),
    );
}

/// Looks up an entry by id, with an error naming it when absent.
pub fn entry(cat: &Catalog, id: usize) -> anyhow::Result<&CatalogEntry> {
    cat.get(id).ok_or_else(|| anyhow!("no entry {id} in the {}-gap list", cat.dimension))
}
