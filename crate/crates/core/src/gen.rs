//! Seeded synthetic workloads.
//!
//! [`generate_suite`] builds a social-network style graph together with six
//! GGDs and a ground-truth file listing exactly the source matches that were
//! made to violate each GGD. [`threshold_graph`] builds name families for
//! edit-distance threshold sweeps.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{dump_graph, labels, GraphBuilder, GraphError, PropertyGraph, Value};
use crate::matcher::Match;

/// The six GGDs checked against [`generate_suite`] graphs.
pub const SUITE_GGDS: &str = r#"# Generated workload suite.
ggd city_in_country {
  source { (c:City) }
  where { }
  target { (c)-[i:isPartOf]->(k:Country) }
  having { }
}

ggd post_has_creator {
  source { (m:Post) }
  where { }
  target { (m)-[h:hasCreator]->(p:Person) }
  having { }
}

ggd knows_symmetric {
  source { (a:Person)-[k:knows]->(b:Person) }
  where { }
  target { (b)-[r:knows]->(a) }
  having { }
}

ggd worker_age {
  source { (p:Person)-[w:worksAt]->(c:Company) }
  where { }
  target { (p) }
  having { absdiff(p.age, 40) <= 30; }
}

ggd lives_in {
  source { (p:Person) }
  where { }
  target { (p)-[l:livesIn]->(c:City) }
  having { }
}

ggd city_name_match {
  source { (p:Person)-[l:livesIn]->(c:City) }
  where { }
  target { (p) }
  having { edit(p.cityName, c.name) <= 1; }
}
"#;

pub const SUITE_NAMES: [&str; 6] = [
    "city_in_country",
    "post_has_creator",
    "knows_symmetric",
    "worker_age",
    "lives_in",
    "city_name_match",
];

/// Counts at scale 1 and violation rates per GGD.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub counts: BTreeMap<String, usize>,
    /// Undirected `knows` pairs per person.
    pub knows_per_person: usize,
    pub rates: BTreeMap<String, f64>,
}

impl GenSpec {
    /// About 100k objects at scale 1, with 1% violations per GGD.
    pub fn base() -> GenSpec {
        GenSpec::with_rate(0.01)
    }

    pub fn with_rate(rate: f64) -> GenSpec {
        let counts = [
            ("Person", 8000),
            ("Company", 400),
            ("City", 800),
            ("Country", 40),
            ("Post", 20000),
        ]
        .into_iter()
        .map(|(l, n)| (l.to_string(), n))
        .collect();
        GenSpec {
            counts,
            knows_per_person: 2,
            rates: SUITE_NAMES.iter().map(|n| (n.to_string(), rate)).collect(),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        for (name, r) in &self.rates {
            if !(0.0..=1.0).contains(r) {
                return Err(format!("rate for `{name}` must lie in [0,1], got {r}"));
            }
        }
        for label in ["Person", "Company", "City", "Country", "Post"] {
            if !self.counts.contains_key(label) {
                return Err(format!("missing count for `{label}`"));
            }
        }
        Ok(())
    }

    /// Per-label counts at `scale`, never below one.
    pub fn scaled(&self, scale: f64) -> BTreeMap<String, usize> {
        self.counts
            .iter()
            .map(|(l, &n)| (l.clone(), ((n as f64 * scale).round() as usize).max(1)))
            .collect()
    }

    fn rate(&self, ggd: &str) -> f64 {
        self.rates.get(ggd).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: PropertyGraph,
    /// Violated source matches per GGD, sorted.
    pub truth: BTreeMap<String, Vec<Match>>,
}

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ne", "su", "ta", "ri", "vo", "be", "da", "fu", "go", "hi", "ju", "pe", "zu",
];

fn word(rng: &mut ChaCha8Rng, parts: usize) -> String {
    let mut s: String = (0..parts).map(|_| *SYLLABLES.choose(rng).expect("syllables")).collect();
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s
}

/// Picks `round(rate * n)` distinct indices out of `pool`.
fn pick(rng: &mut ChaCha8Rng, pool: &[usize], rate: f64) -> BTreeSet<usize> {
    let k = ((pool.len() as f64) * rate).round() as usize;
    pool.choose_multiple(rng, k.min(pool.len())).copied().collect()
}

fn one(pairs: &[(&str, &str)]) -> Match {
    pairs.iter().map(|(v, id)| (v.to_string(), id.to_string())).collect()
}

/// Deterministic in (spec, seed, scale).
pub fn generate_suite(spec: &GenSpec, seed: u64, scale: f64) -> Result<Generated, String> {
    spec.check()?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(format!("scale must be positive, got {scale}"));
    }
    let n = spec.scaled(scale);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    let mut truth: BTreeMap<String, Vec<Match>> = SUITE_NAMES.iter().map(|s| (s.to_string(), Vec::new())).collect();
    let id = |prefix: &str, i: usize| format!("{prefix}{i}");
    let mut edge_no = 0usize;
    let mut next_edge = |label: &str| {
        edge_no += 1;
        format!("{label}{edge_no}")
    };

    for i in 0..n["Country"] {
        let name = word(&mut rng, 3);
        b.vertex(
            id("country", i),
            labels(["Country"]),
            BTreeMap::from([("name".into(), Value::text(name))]),
        );
    }
    let mut city_names = Vec::new();
    for i in 0..n["City"] {
        let name = format!("{}{i}", word(&mut rng, 3));
        city_names.push(name.clone());
        b.vertex(
            id("city", i),
            labels(["City"]),
            BTreeMap::from([("name".into(), Value::text(name))]),
        );
    }
    for i in 0..n["Company"] {
        let name = word(&mut rng, 4);
        b.vertex(
            id("company", i),
            labels(["Company"]),
            BTreeMap::from([("name".into(), Value::text(name))]),
        );
    }

    let persons: Vec<usize> = (0..n["Person"]).collect();
    // Person-level injections use disjoint person sets.
    let mut shuffled = persons.clone();
    shuffled.shuffle(&mut rng);
    let take = |from: &mut Vec<usize>, rate: f64, pool: usize| -> BTreeSet<usize> {
        let k = ((pool as f64) * rate).round() as usize;
        from.drain(..k.min(from.len())).collect()
    };
    let old = take(&mut shuffled, spec.rate("worker_age"), persons.len());
    let homeless = take(&mut shuffled, spec.rate("lives_in"), persons.len());
    let misnamed = take(&mut shuffled, spec.rate("city_name_match"), persons.len());

    let mut home = vec![0usize; persons.len()];
    for &p in &persons {
        home[p] = rng.gen_range(0..n["City"]);
        let age = if old.contains(&p) { 80 } else { rng.gen_range(18..=70) };
        let city = &city_names[home[p]];
        let city_name = if misnamed.contains(&p) {
            format!("{city}###")
        } else if rng.gen_bool(0.3) {
            format!("{city}e")
        } else {
            city.clone()
        };
        let props = BTreeMap::from([
            ("name".to_string(), Value::text(word(&mut rng, 2))),
            ("age".to_string(), Value::Integer(age)),
            ("cityName".to_string(), Value::text(city_name)),
        ]);
        b.vertex(id("person", p), labels(["Person"]), props);
    }
    for i in 0..n["Post"] {
        let props = BTreeMap::from([("length".to_string(), Value::Integer(rng.gen_range(1..=2000)))]);
        b.vertex(id("post", i), labels(["Post"]), props);
    }

    let cities: Vec<usize> = (0..n["City"]).collect();
    let orphan_cities = pick(&mut rng, &cities, spec.rate("city_in_country"));
    for &c in &cities {
        if orphan_cities.contains(&c) {
            truth
                .get_mut("city_in_country")
                .unwrap()
                .push(one(&[("c", &id("city", c))]));
        } else {
            let k = rng.gen_range(0..n["Country"]);
            b.edge(
                next_edge("isPartOf"),
                id("city", c),
                id("country", k),
                labels(["isPartOf"]),
                BTreeMap::new(),
            );
        }
    }

    let posts: Vec<usize> = (0..n["Post"]).collect();
    let anonymous = pick(&mut rng, &posts, spec.rate("post_has_creator"));
    for &m in &posts {
        if anonymous.contains(&m) {
            truth
                .get_mut("post_has_creator")
                .unwrap()
                .push(one(&[("m", &id("post", m))]));
        } else {
            let p = rng.gen_range(0..persons.len());
            b.edge(
                next_edge("hasCreator"),
                id("post", m),
                id("person", p),
                labels(["hasCreator"]),
                BTreeMap::new(),
            );
        }
    }

    for &p in &persons {
        let c = rng.gen_range(0..n["Company"]);
        let (pid, cid) = (id("person", p), id("company", c));
        let e = next_edge("worksAt");
        if old.contains(&p) {
            truth
                .get_mut("worker_age")
                .unwrap()
                .push(one(&[("c", &cid), ("p", &pid), ("w", &e)]));
        }
        b.edge(e, pid, cid, labels(["worksAt"]), BTreeMap::new());
    }

    for &p in &persons {
        let pid = id("person", p);
        if homeless.contains(&p) {
            truth.get_mut("lives_in").unwrap().push(one(&[("p", &pid)]));
            continue;
        }
        let cid = id("city", home[p]);
        let e = next_edge("livesIn");
        if misnamed.contains(&p) {
            truth
                .get_mut("city_name_match")
                .unwrap()
                .push(one(&[("c", &cid), ("l", &e), ("p", &pid)]));
        }
        b.edge(e, pid, cid, labels(["livesIn"]), BTreeMap::new());
    }

    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    if persons.len() > 1 {
        let want = persons.len() * spec.knows_per_person;
        let mut guard = 0;
        while pairs.len() < want && guard < want * 20 {
            guard += 1;
            let a = rng.gen_range(0..persons.len());
            let b2 = rng.gen_range(0..persons.len());
            if a != b2 {
                pairs.insert((a.min(b2), a.max(b2)));
            }
        }
    }
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let indices: Vec<usize> = (0..pairs.len()).collect();
    let one_way = pick(&mut rng, &indices, spec.rate("knows_symmetric"));
    for (i, &(a, c)) in pairs.iter().enumerate() {
        let (aid, cid) = (id("person", a), id("person", c));
        let forward = next_edge("knows");
        if one_way.contains(&i) {
            truth
                .get_mut("knows_symmetric")
                .unwrap()
                .push(one(&[("a", &aid), ("b", &cid), ("k", &forward)]));
        } else {
            b.edge(
                next_edge("knows"),
                cid.clone(),
                aid.clone(),
                labels(["knows"]),
                BTreeMap::new(),
            );
        }
        b.edge(forward, aid, cid, labels(["knows"]), BTreeMap::new());
    }

    for list in truth.values_mut() {
        list.sort();
    }
    let graph = b.build().map_err(|e| e.to_string())?;
    Ok(Generated { graph, truth })
}

/// Writes `vertices.csv`, `edges.csv`, `truth.json` and `suite.ggd`.
pub fn write_generated(g: &Generated, dir: &Path) -> Result<(), GraphError> {
    dump_graph(&g.graph, dir)?;
    let io = |path: &Path, e: std::io::Error| GraphError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let truth_path = dir.join("truth.json");
    std::fs::write(&truth_path, truth_json(&g.truth)).map_err(|e| io(&truth_path, e))?;
    let suite_path = dir.join("suite.ggd");
    std::fs::write(&suite_path, SUITE_GGDS).map_err(|e| io(&suite_path, e))?;
    Ok(())
}

/// Ground truth as JSON with sorted keys, one match per line.
pub fn truth_json(truth: &BTreeMap<String, Vec<Match>>) -> String {
    let esc = |s: &str| s.replace('\\', "\\\\").replace('"', "\\\"");
    let mut out = String::from("{\n");
    let mut first = true;
    for (name, matches) in truth {
        if !first {
            out.push_str(",\n");
        }
        first = false;
        out.push_str(&format!("  \"{}\": [", esc(name)));
        for (i, m) in matches.iter().enumerate() {
            let fields: Vec<String> = m
                .iter()
                .map(|(k, v)| format!("\"{}\": \"{}\"", esc(k), esc(v)))
                .collect();
            out.push_str(if i == 0 { "\n    {" } else { ",\n    {" });
            out.push_str(&fields.join(", "));
            out.push('}');
        }
        out.push_str(if matches.is_empty() { "]" } else { "\n  ]" });
    }
    out.push_str("\n}\n");
    out
}

/// Persons in name families: each family shares a random root name and
/// every member carries the root with 0 to 6 substitutions. Members know
/// three others in their family and one random person.
pub fn threshold_graph(vertices: usize, seed: u64) -> PropertyGraph {
    const ALPHABET: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    let mut families: Vec<Vec<usize>> = Vec::new();
    let mut made = 0;
    while made < vertices {
        let size = rng.gen_range(5..=10).min(vertices - made);
        let root: Vec<u8> = (0..12).map(|_| *ALPHABET.choose(&mut rng).expect("alphabet")).collect();
        let mut members = Vec::new();
        for _ in 0..size {
            let mut name = root.clone();
            let k = rng.gen_range(0..=6);
            let mut positions: Vec<usize> = (0..name.len()).collect();
            positions.shuffle(&mut rng);
            for &pos in &positions[..k] {
                let mut c = *ALPHABET.choose(&mut rng).expect("alphabet");
                while c == root[pos] {
                    c = *ALPHABET.choose(&mut rng).expect("alphabet");
                }
                name[pos] = c;
            }
            let name = String::from_utf8(name).expect("ascii name");
            b.vertex(
                format!("p{made}"),
                labels(["Person"]),
                BTreeMap::from([("name".to_string(), Value::text(name))]),
            );
            members.push(made);
            made += 1;
        }
        families.push(members);
    }
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for fam in &families {
        for &m in fam {
            let others: Vec<usize> = fam.iter().copied().filter(|&o| o != m).collect();
            for &o in others.choose_multiple(&mut rng, 3.min(others.len())) {
                edges.insert((m, o));
            }
            if vertices > 1 {
                let o = rng.gen_range(0..vertices);
                if o != m {
                    edges.insert((m, o));
                }
            }
        }
    }
    for (i, (s, t)) in edges.into_iter().enumerate() {
        b.edge(
            format!("k{i}"),
            format!("p{s}"),
            format!("p{t}"),
            labels(["knows"]),
            BTreeMap::new(),
        );
    }
    b.build().expect("generated graph is well formed")
}

/// The edit-distance GGD swept over thresholds on [`threshold_graph`].
pub fn threshold_ggd(t: usize) -> String {
    format!(
        "ggd similar_names {{\n  source {{ (a:Person)-[k:knows]->(b:Person) }}\n  where {{ edit(a.name, b.name) <= {t}; }}\n  target {{ (a) }}\n  having {{ }}\n}}\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_ggds;

    #[test]
    fn suite_parses() {
        let s = parse_ggds(SUITE_GGDS).unwrap();
        let names: Vec<&str> = s.iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, SUITE_NAMES);
    }

    #[test]
    fn scale_doubles_counts() {
        let spec = GenSpec::base();
        let one = spec.scaled(1.0);
        let two = spec.scaled(2.0);
        for (l, n) in &one {
            assert_eq!(two[l], 2 * n);
        }
    }

    #[test]
    fn bad_rate_rejected() {
        let mut spec = GenSpec::base();
        spec.rates.insert("lives_in".into(), 1.5);
        assert!(spec.check().is_err());
    }
}
