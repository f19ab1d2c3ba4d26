//! MegaClouds: neighbouring same-class data clouds merged into larger regions,
//! and the IF-THEN rules and visualization tables built from them.
//!
//! Two clouds are neighbours when their areas of influence overlap, i.e. the
//! distance between prototypes does not exceed the sum of their radii.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::density::typicality;
use crate::error::{Error, Result};
use crate::feature_space::sq_dist;
use crate::learner::{ClassId, Model};

/// A group of same-class clouds, identified by global cloud index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MegaCloud {
    pub id: usize,
    pub class_id: ClassId,
    /// Ascending global cloud indices.
    pub member_cloud_ids: Vec<usize>,
    /// Prototype references of the member clouds, one per member, same order.
    pub representative_refs: Vec<String>,
    /// Reference of the member with the largest support (lowest index on ties).
    pub primary_ref: String,
}

/// Overlap graph over all clouds of a model. Node weights are global cloud indices.
pub type Adjacency = UnGraph<usize, ()>;

pub fn build_adjacency(model: &Model) -> Adjacency {
    let clouds: Vec<_> = model.clouds().collect();
    let mut graph = Adjacency::with_capacity(clouds.len(), 0);
    for i in 0..clouds.len() {
        graph.add_node(i);
    }
    let radii: Vec<f64> = clouds.iter().map(|c| c.radius_sq.max(0.0).sqrt()).collect();
    for i in 0..clouds.len() {
        for j in i + 1..clouds.len() {
            let dist = sq_dist(&clouds[i].prototype, &clouds[j].prototype).sqrt();
            if dist <= radii[i] + radii[j] {
                graph.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
            }
        }
    }
    graph
}

/// Connected components of the adjacency graph restricted to same-class edges.
///
/// MegaCloud ids follow the smallest member index of each component.
pub fn merge_megaclouds(model: &Model, graph: &Adjacency) -> Vec<MegaCloud> {
    let clouds: Vec<_> = model.clouds().collect();
    let mut sets = UnionFind::<usize>::new(clouds.len());
    for edge in graph.raw_edges() {
        let (a, b) = (graph[edge.source()], graph[edge.target()]);
        if clouds[a].class_id == clouds[b].class_id {
            sets.union(a, b);
        }
    }
    // BTreeMap keyed by first member keeps components in ascending order of first member
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut root_first: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..clouds.len() {
        let root = sets.find(i);
        let first = *root_first.entry(root).or_insert(i);
        components.entry(first).or_default().push(i);
    }
    components
        .into_values()
        .enumerate()
        .map(|(id, members)| {
            let mut primary = members[0];
            for &m in &members[1..] {
                if clouds[m].support > clouds[primary].support {
                    primary = m;
                }
            }
            MegaCloud {
                id,
                class_id: clouds[members[0]].class_id,
                representative_refs: members
                    .iter()
                    .map(|&m| clouds[m].source_ref.clone())
                    .collect(),
                primary_ref: clouds[primary].source_ref.clone(),
                member_cloud_ids: members,
            }
        })
        .collect()
}

/// Checks that `megaclouds` partition the model's clouds into class-homogeneous groups.
pub fn check_partition(model: &Model, megaclouds: &[MegaCloud]) -> Result<()> {
    let clouds: Vec<_> = model.clouds().collect();
    let mut seen = vec![false; clouds.len()];
    for (k, mc) in megaclouds.iter().enumerate() {
        if mc.id != k {
            return Err(Error::State(format!(
                "MegaCloud at position {k} has id {}",
                mc.id
            )));
        }
        if mc.member_cloud_ids.is_empty() {
            return Err(Error::State(format!("MegaCloud {k} is empty")));
        }
        if mc.member_cloud_ids.len() != mc.representative_refs.len() {
            return Err(Error::State(format!(
                "MegaCloud {k}: one reference per member expected"
            )));
        }
        for (&m, r) in mc.member_cloud_ids.iter().zip(&mc.representative_refs) {
            let cloud = clouds
                .get(m)
                .ok_or_else(|| Error::State(format!("MegaCloud {k} names unknown cloud {m}")))?;
            if std::mem::replace(&mut seen[m], true) {
                return Err(Error::State(format!(
                    "cloud {m} belongs to more than one MegaCloud"
                )));
            }
            if cloud.class_id != mc.class_id {
                return Err(Error::State(format!(
                    "MegaCloud {k} of class {} contains cloud {m} of class {}",
                    mc.class_id, cloud.class_id
                )));
            }
            if &cloud.source_ref != r {
                return Err(Error::State(format!(
                    "MegaCloud {k}: reference of cloud {m} does not match"
                )));
            }
        }
        if !mc.representative_refs.contains(&mc.primary_ref) {
            return Err(Error::State(format!(
                "MegaCloud {k}: primary reference is not a member"
            )));
        }
    }
    if let Some(m) = seen.iter().position(|s| !s) {
        return Err(Error::State(format!("cloud {m} belongs to no MegaCloud")));
    }
    Ok(())
}

/// Granularity of rule antecedents.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RuleLevel {
    /// One `(I ~ ref)` term per MegaCloud, using its primary reference.
    #[default]
    MegaCloud,
    /// One term per prototype.
    Prototype,
}

/// `IF (I ~ ref1) OR (I ~ ref2) ... THEN (class c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub class_id: ClassId,
    pub antecedent_refs: Vec<String>,
    pub rendered_text: String,
}

impl Rule {
    pub fn new(class_id: ClassId, antecedent_refs: Vec<String>) -> Self {
        let rendered_text = render_rule(class_id, &antecedent_refs);
        Self {
            class_id,
            antecedent_refs,
            rendered_text,
        }
    }

    /// Parses a rendered rule line back into its class and references.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |why: &str| Error::Format(format!("malformed rule ({why}): {text:?}"));
        let mut rest = text.strip_prefix("IF ").ok_or_else(|| bad("missing IF"))?;
        let mut refs = Vec::new();
        loop {
            rest = rest
                .strip_prefix("(I ~ ")
                .ok_or_else(|| bad("expected (I ~"))?;
            let (r, after) =
                unescape_until_paren(rest).ok_or_else(|| bad("unterminated reference"))?;
            refs.push(r);
            rest = after;
            if let Some(next) = rest.strip_prefix(" OR ") {
                rest = next;
                continue;
            }
            break;
        }
        let class = rest
            .strip_prefix(" THEN (class ")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| bad("expected THEN (class c)"))?;
        let class_id = class
            .parse()
            .map_err(|_| bad("class id is not an integer"))?;
        let rule = Self::new(class_id, refs);
        if rule.rendered_text != text {
            return Err(bad("non-canonical spacing"));
        }
        Ok(rule)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rendered_text)
    }
}

fn escape_ref(r: &str, out: &mut String) {
    for ch in r.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '(' => out.push_str("\\("),
            ')' => out.push_str("\\)"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
}

fn unescape_until_paren(s: &str) -> Option<(String, &str)> {
    let mut out = String::new();
    let mut chars = s.char_indices();
    while let Some((i, ch)) = chars.next() {
        match ch {
            ')' => return Some((out, &s[i + 1..])),
            '\\' => match chars.next()?.1 {
                'n' => out.push('\n'),
                'r' => out.push('\r'),
                c @ ('\\' | '(' | ')') => out.push(c),
                _ => return None,
            },
            '(' => return None,
            c => out.push(c),
        }
    }
    None
}

fn render_rule(class_id: ClassId, refs: &[String]) -> String {
    let mut text = String::from("IF ");
    for (k, r) in refs.iter().enumerate() {
        if k > 0 {
            text.push_str(" OR ");
        }
        text.push_str("(I ~ ");
        escape_ref(r, &mut text);
        text.push(')');
    }
    text.push_str(&format!(" THEN (class {class_id})"));
    text
}

/// One rule per class, in ascending class order.
pub fn generate_rules(
    model: &Model,
    megaclouds: &[MegaCloud],
    level: RuleLevel,
) -> Result<Vec<Rule>> {
    if megaclouds.is_empty() {
        return Err(Error::State("no MegaClouds to build rules from".into()));
    }
    let mut per_class: BTreeMap<ClassId, Vec<String>> = BTreeMap::new();
    for mc in megaclouds {
        let refs = per_class.entry(mc.class_id).or_default();
        match level {
            RuleLevel::MegaCloud => refs.push(mc.primary_ref.clone()),
            RuleLevel::Prototype => refs.extend(mc.representative_refs.iter().cloned()),
        }
    }
    for class in &model.classes {
        if !per_class.contains_key(&class.class_id) {
            return Err(Error::State(format!(
                "class {} has no MegaCloud",
                class.class_id
            )));
        }
    }
    Ok(per_class
        .into_iter()
        .map(|(class_id, refs)| Rule::new(class_id, refs))
        .collect())
}

/// Rule file contents: one rule per line, newline-terminated.
pub fn render_rule_file(rules: &[Rule]) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&r.rendered_text);
        out.push('\n');
    }
    out
}

pub fn parse_rule_file(text: &str) -> Result<Vec<Rule>> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(Rule::parse)
        .collect()
}

/// Coordinates written for each prototype in a visualization export.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Projection {
    /// The two dimensions with the highest training variance.
    #[default]
    TopVariance,
    /// Every dimension.
    Full,
}

/// Per-dimension variance of the training data in the model's space.
///
/// Uses the stored normalization when present, otherwise the support-weighted
/// spread of the prototypes.
pub fn training_variance(model: &Model) -> Vec<f64> {
    if let Some(params) = &model.normalization {
        return params.normalized_variance();
    }
    let total: f64 = model.clouds().map(|c| c.support as f64).sum();
    let mut mean = vec![0.0; model.dim];
    for c in model.clouds() {
        for (m, p) in mean.iter_mut().zip(&c.prototype) {
            *m += c.support as f64 * p / total;
        }
    }
    let mut var = vec![0.0; model.dim];
    for c in model.clouds() {
        for (j, p) in c.prototype.iter().enumerate() {
            let d = p - mean[j];
            var[j] += c.support as f64 * d * d / total;
        }
    }
    var
}

/// Indices of the (up to) two highest-variance dimensions, ties to the lower index.
pub fn projection_dims(model: &Model) -> Vec<usize> {
    let var = training_variance(model);
    let mut dims: Vec<usize> = (0..var.len()).collect();
    dims.sort_by(|&a, &b| var[b].total_cmp(&var[a]).then(a.cmp(&b)));
    dims.truncate(2);
    dims
}

#[derive(Debug, Clone, PartialEq)]
pub struct VizRow {
    pub cloud_id: usize,
    pub class_id: ClassId,
    pub megacloud_id: usize,
    pub support: u64,
    pub radius_sq: f64,
    pub source_ref: String,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VizExport {
    /// Names of the coordinate columns.
    pub coord_names: Vec<String>,
    pub rows: Vec<VizRow>,
}

impl VizExport {
    pub fn to_csv(&self) -> Result<String> {
        let mut header = vec![
            "cloud_id".to_string(),
            "class_id".into(),
            "megacloud_id".into(),
            "support".into(),
            "radius_sq".into(),
            "source_ref".into(),
        ];
        header.extend(self.coord_names.iter().cloned());
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let mut rec = vec![
                r.cloud_id.to_string(),
                r.class_id.to_string(),
                r.megacloud_id.to_string(),
                r.support.to_string(),
                r.radius_sq.to_string(),
                r.source_ref.clone(),
            ];
            rec.extend(r.coords.iter().map(f64::to_string));
            rows.push(rec);
        }
        write_csv(&header, &rows)
    }
}

pub(crate) fn write_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let csv_err = |e: csv::Error| Error::Format(format!("csv encoding failed: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(format!("csv encoding failed: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Prototype table with MegaCloud assignment, supports and radii.
pub fn export_viz(
    model: &Model,
    megaclouds: &[MegaCloud],
    projection: Projection,
) -> Result<VizExport> {
    let n = model.n_clouds();
    let mut assignment = vec![usize::MAX; n];
    for mc in megaclouds {
        for &m in &mc.member_cloud_ids {
            let slot = assignment.get_mut(m).ok_or_else(|| {
                Error::State(format!("MegaCloud {} names unknown cloud {m}", mc.id))
            })?;
            *slot = mc.id;
        }
    }
    if let Some(missing) = assignment.iter().position(|&a| a == usize::MAX) {
        return Err(Error::State(format!(
            "cloud {missing} belongs to no MegaCloud"
        )));
    }
    let dims: Vec<usize> = match projection {
        Projection::TopVariance => projection_dims(model),
        Projection::Full => (0..model.dim).collect(),
    };
    let coord_names = match projection {
        Projection::TopVariance => ["x", "y"]
            .iter()
            .take(dims.len())
            .map(|s| s.to_string())
            .collect(),
        Projection::Full => dims.iter().map(|j| format!("f{j}")).collect(),
    };
    let rows = model
        .clouds()
        .enumerate()
        .map(|(i, c)| VizRow {
            cloud_id: i,
            class_id: c.class_id,
            megacloud_id: assignment[i],
            support: c.support,
            radius_sq: c.radius_sq,
            source_ref: c.source_ref.clone(),
            coords: dims.iter().map(|&j| c.prototype[j]).collect(),
        })
        .collect();
    Ok(VizExport { coord_names, rows })
}

/// Typicality of one class over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TypicalityProfile {
    pub class_id: ClassId,
    pub grid: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

pub fn typicality_profile(
    model: &Model,
    class_id: ClassId,
    grid: Vec<Vec<f64>>,
) -> Result<TypicalityProfile> {
    let class = model
        .class(class_id)
        .ok_or_else(|| Error::State(format!("model has no class {class_id}")))?;
    let weights = typicality(&class.clouds, &grid)?;
    Ok(TypicalityProfile {
        class_id,
        grid,
        weights,
    })
}

/// A `steps × steps` lattice over `[0, 1]²` in the projection dimensions, with
/// every other dimension held at the class mean.
pub fn projection_grid(model: &Model, class_id: ClassId, steps: usize) -> Result<Vec<Vec<f64>>> {
    if steps < 2 {
        return Err(Error::Data("grid needs at least 2 steps per axis".into()));
    }
    let class = model
        .class(class_id)
        .ok_or_else(|| Error::State(format!("model has no class {class_id}")))?;
    let dims = projection_dims(model);
    let axis: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    let mut grid = Vec::new();
    let second: &[f64] = if dims.len() > 1 { &axis } else { &[0.0] };
    for &b in second {
        for &a in &axis {
            let mut p = class.stats.mean.clone();
            p[dims[0]] = a;
            if dims.len() > 1 {
                p[dims[1]] = b;
            }
            grid.push(p);
        }
    }
    Ok(grid)
}

/// Long-format table: class, grid index, grid coordinates, weight.
pub fn typicality_csv(profiles: &[TypicalityProfile], dims: &[usize]) -> Result<String> {
    let mut header = vec!["class_id".to_string(), "point".into()];
    header.extend(dims.iter().map(|j| format!("f{j}")));
    header.push("typicality".into());
    let mut rows = Vec::new();
    for p in profiles {
        for (k, (g, w)) in p.grid.iter().zip(&p.weights).enumerate() {
            let mut rec = vec![p.class_id.to_string(), k.to_string()];
            rec.extend(dims.iter().map(|&j| g[j].to_string()));
            rec.push(w.to_string());
            rows.push(rec);
        }
    }
    write_csv(&header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::{ClassModel, DataCloud, TrainingConfig};

    pub(crate) fn model_from(clouds: Vec<(ClassId, Vec<f64>, f64, u64, &str)>) -> Model {
        let dim = clouds[0].1.len();
        let mut classes: BTreeMap<ClassId, ClassModel> = BTreeMap::new();
        for (class_id, p, radius_sq, support, r) in clouds {
            let class = classes
                .entry(class_id)
                .or_insert_with(|| ClassModel::empty(class_id));
            for _ in 0..support {
                class.stats.update(&p).unwrap();
            }
            class.clouds.push(DataCloud {
                prototype: p,
                support,
                radius_sq,
                source_ref: r.into(),
                class_id,
            });
        }
        Model::from_classes(
            dim,
            vec![],
            classes.into_values().collect(),
            TrainingConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn overlap_defines_edges() {
        let m = model_from(vec![
            (0, vec![0.0], 0.04, 1, "a"),
            (0, vec![0.3], 0.04, 1, "b"),
        ]);
        assert_eq!(build_adjacency(&m).edge_count(), 1);
        let m = model_from(vec![
            (0, vec![0.0], 0.04, 1, "a"),
            (0, vec![1.0], 0.04, 1, "b"),
        ]);
        assert_eq!(build_adjacency(&m).edge_count(), 0);
        let m = model_from(vec![(0, vec![0.0], 0.04, 1, "a")]);
        assert_eq!(build_adjacency(&m).edge_count(), 0);
    }

    #[test]
    fn chain_across_classes_splits() {
        // A(0)–B(0) overlap, B(0)–C(1) overlap
        let m = model_from(vec![
            (0, vec![0.0], 0.04, 1, "A"),
            (0, vec![0.3], 0.04, 1, "B"),
            (1, vec![0.6], 0.04, 1, "C"),
        ]);
        let g = build_adjacency(&m);
        assert_eq!(g.edge_count(), 2);
        let mcs = merge_megaclouds(&m, &g);
        let sets: Vec<_> = mcs.iter().map(|mc| mc.member_cloud_ids.clone()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![2]]);
        assert_eq!(mcs[1].class_id, 1);
    }

    #[test]
    fn isolated_clouds_are_singletons() {
        let m = model_from(vec![
            (0, vec![0.0, 0.0], 0.0, 1, "a"),
            (0, vec![1.0, 0.0], 0.0, 2, "b"),
            (1, vec![0.0, 1.0], 0.0, 1, "c"),
        ]);
        let mcs = merge_megaclouds(&m, &build_adjacency(&m));
        assert_eq!(mcs.len(), 3);
    }

    #[test]
    fn primary_ref_is_highest_support_member() {
        let m = model_from(vec![
            (0, vec![0.0], 0.04, 1, "a"),
            (0, vec![0.3], 0.04, 3, "b"),
            (0, vec![0.6], 0.04, 3, "c"),
        ]);
        let mcs = merge_megaclouds(&m, &build_adjacency(&m));
        assert_eq!(mcs.len(), 1);
        assert_eq!(mcs[0].primary_ref, "b");
        assert_eq!(mcs[0].representative_refs, vec!["a", "b", "c"]);
    }

    #[test]
    fn rule_shapes() {
        let m = model_from(vec![
            (0, vec![0.0], 0.0, 1, "road_1.jpg"),
            (0, vec![0.5], 0.0, 1, "road_2.jpg"),
            (0, vec![1.0], 0.0, 1, "road_3.jpg"),
            (1, vec![0.2], 0.0, 1, "snow.jpg"),
        ]);
        let rules = generate_rules(&m, &m.megaclouds, RuleLevel::MegaCloud).unwrap();
        assert_eq!(
            rules[0].rendered_text,
            "IF (I ~ road_1.jpg) OR (I ~ road_2.jpg) OR (I ~ road_3.jpg) THEN (class 0)"
        );
        assert_eq!(rules[1].rendered_text, "IF (I ~ snow.jpg) THEN (class 1)");
        assert!(matches!(
            generate_rules(&m, &[], RuleLevel::MegaCloud),
            Err(Error::State(_))
        ));

        let m = model_from(vec![
            (0, vec![0.0], 0.04, 1, "a"),
            (0, vec![0.3], 0.04, 1, "b"),
            (0, vec![1.0], 0.0, 1, "c"),
        ]);
        let coarse = generate_rules(&m, &m.megaclouds, RuleLevel::MegaCloud).unwrap();
        assert_eq!(coarse[0].antecedent_refs, vec!["a", "c"]);
        let fine = generate_rules(&m, &m.megaclouds, RuleLevel::Prototype).unwrap();
        assert_eq!(fine[0].antecedent_refs, vec!["a", "b", "c"]);
    }

    #[test]
    fn rule_escaping_round_trips() {
        let refs = vec![
            "a (1).png".to_string(),
            "x) OR (I ~ y".into(),
            "back\\slash\nnl".into(),
            String::new(),
        ];
        let rule = Rule::new(7, refs.clone());
        let parsed = Rule::parse(&rule.rendered_text).unwrap();
        assert_eq!(parsed.class_id, 7);
        assert_eq!(parsed.antecedent_refs, refs);
        assert!(!rule.rendered_text.contains('\n'));
    }

    #[test]
    fn malformed_rules_are_rejected() {
        for bad in [
            "",
            "IF (I ~ a) THEN (class x)",
            "IF (I ~ a THEN (class 1)",
            "IF (I ~ a)  THEN (class 1)",
            "IF (I ~ a) OR THEN (class 1)",
        ] {
            assert!(matches!(Rule::parse(bad), Err(Error::Format(_))), "{bad}");
        }
    }

    #[test]
    fn viz_export_rows() {
        let m = model_from(vec![
            (0, vec![0.0, 0.5, 0.1], 0.04, 1, "a"),
            (0, vec![0.3, 0.5, 0.9], 0.04, 2, "b"),
            (1, vec![0.9, 0.5, 0.2], 0.0, 1, "c"),
        ]);
        let viz = export_viz(&m, &m.megaclouds, Projection::TopVariance).unwrap();
        assert_eq!(viz.rows.len(), 3);
        assert_eq!(viz.coord_names, vec!["x", "y"]);
        let ids: Vec<usize> = m.megaclouds.iter().map(|mc| mc.id).collect();
        assert!(viz.rows.iter().all(|r| ids.contains(&r.megacloud_id)));
        // dimension 1 is constant, so it is never projected
        assert!(!projection_dims(&m).contains(&1));
        let csv = viz.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 4);
        assert!(
            csv.starts_with("cloud_id,class_id,megacloud_id,support,radius_sq,source_ref,x,y\n")
        );
        let full = export_viz(&m, &m.megaclouds, Projection::Full).unwrap();
        assert_eq!(full.coord_names, vec!["f0", "f1", "f2"]);
    }

    #[test]
    fn typicality_profile_sums_to_one() {
        let m = model_from(vec![
            (0, vec![0.2, 0.3], 0.05, 4, "a"),
            (0, vec![0.7, 0.6], 0.02, 2, "b"),
        ]);
        let grid = projection_grid(&m, 0, 11).unwrap();
        assert_eq!(grid.len(), 121);
        let prof = typicality_profile(&m, 0, grid).unwrap();
        let total: f64 = prof.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(typicality_profile(&m, 9, vec![vec![0.0, 0.0]]).is_err());
    }
}
