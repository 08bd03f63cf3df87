//! Text model format (numbers with 17 significant digits):
//!
//! ```text
//! GBDT v1 <n_trees> <base_score> <learning_rate>
//! P <n_features> <max_depth> <min_child_weight> <lambda_l2> <subsample_rows> <seed>
//! T <n_nodes>                      -- once per tree, followed by its nodes
//! N <feature> <split> <gain>       -- internal node; left subtree follows, then right
//! L <weight>                       -- leaf
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use super::{GbdtModel, GbdtParams, Node, Tree};
use crate::data_model::io::{create, open};
use crate::error::{Error, Result};
use crate::util::fmt_f64;

pub fn write_model_to<W: Write>(model: &GbdtModel, mut w: W, path: &Path) -> Result<()> {
    let p = &model.params;
    let mut s = format!(
        "GBDT v1 {} {} {}\nP {} {} {} {} {} {}\n",
        model.trees.len(),
        fmt_f64(model.base_score),
        fmt_f64(p.learning_rate),
        model.n_features,
        p.max_depth,
        fmt_f64(p.min_child_weight),
        fmt_f64(p.lambda_l2),
        fmt_f64(p.subsample_rows),
        p.seed
    );
    for t in &model.trees {
        let _ = writeln!(s, "T {}", t.nodes.len());
        for node in &t.nodes {
            let _ = match node {
                Node::Split { feature, split, gain, .. } => {
                    writeln!(s, "N {feature} {} {}", fmt_f64(*split), fmt_f64(*gain))
                }
                Node::Leaf { weight } => writeln!(s, "L {}", fmt_f64(*weight)),
            };
        }
    }
    w.write_all(s.as_bytes()).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn save_model(model: &GbdtModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_model_to(model, create(path)?, path)
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::vec::IntoIter<String>>,
    path: &'a Path,
    line: u64,
}

impl Lines<'_> {
    fn next(&mut self, what: &str) -> Result<Vec<String>> {
        match self.it.next() {
            Some((i, l)) => {
                self.line = i as u64 + 1;
                Ok(l.split_ascii_whitespace().map(str::to_owned).collect())
            }
            None => Err(Error::schema(self.path, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.path, self.line, msg)
    }

    fn num<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse().map_err(|_| self.err(format!("bad {what}: {s:?}")))
    }

    fn float(&self, s: &str, what: &str) -> Result<f64> {
        let x: f64 = self.num(s, what)?;
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.err(format!("non-finite {what}")))
        }
    }
}

fn read_subtree(lines: &mut Lines, nodes: &mut Vec<Node>, budget: usize, n_features: usize, depth: usize, max_depth: usize) -> Result<usize> {
    if nodes.len() >= budget {
        return Err(lines.err("tree has more nodes than declared"));
    }
    let f = lines.next("a node")?;
    let at = nodes.len();
    match f.first().map(String::as_str) {
        Some("L") if f.len() == 2 => {
            let weight = lines.float(&f[1], "leaf weight")?;
            nodes.push(Node::Leaf { weight });
        }
        Some("N") if f.len() == 4 => {
            let feature: usize = lines.num(&f[1], "feature index")?;
            if feature >= n_features {
                return Err(lines.err(format!("feature {feature} out of range (n_features = {n_features})")));
            }
            if depth >= max_depth {
                return Err(lines.err(format!("tree deeper than max_depth {max_depth}")));
            }
            let split = lines.float(&f[2], "split")?;
            let gain = lines.float(&f[3], "gain")?;
            nodes.push(Node::Leaf { weight: 0.0 });
            let left = read_subtree(lines, nodes, budget, n_features, depth + 1, max_depth)?;
            let right = read_subtree(lines, nodes, budget, n_features, depth + 1, max_depth)?;
            nodes[at] = Node::Split { feature, split, gain, left, right };
        }
        _ => return Err(lines.err(format!("expected `N <feature> <split> <gain>` or `L <weight>`, got {:?}", f.join(" ")))),
    }
    Ok(at)
}

pub fn read_model_from<R: BufRead>(r: R, path: &Path) -> Result<GbdtModel> {
    let all: Vec<String> = r.lines().collect::<std::io::Result<_>>().map_err(|e| Error::io(path, e))?;
    let mut lines = Lines { it: all.into_iter().enumerate(), path, line: 0 };

    let h = lines.next("header")?;
    if h.len() != 5 || h[0] != "GBDT" {
        return Err(lines.err("expected `GBDT v1 <n_trees> <base_score> <learning_rate>`"));
    }
    if h[1] != "v1" {
        return Err(lines.err(format!("unsupported model version {:?}", h[1])));
    }
    let n_trees: usize = lines.num(&h[2], "tree count")?;
    let base_score = lines.float(&h[3], "base score")?;
    let learning_rate = lines.float(&h[4], "learning rate")?;

    let p = lines.next("parameter line")?;
    if p.len() != 7 || p[0] != "P" {
        return Err(lines.err("expected `P <n_features> <max_depth> <min_child_weight> <lambda_l2> <subsample_rows> <seed>`"));
    }
    let n_features: usize = lines.num(&p[1], "feature count")?;
    let params = GbdtParams {
        n_trees,
        max_depth: lines.num(&p[2], "max depth")?,
        learning_rate,
        min_child_weight: lines.float(&p[3], "min child weight")?,
        lambda_l2: lines.float(&p[4], "lambda")?,
        subsample_rows: lines.float(&p[5], "subsample")?,
        seed: lines.num(&p[6], "seed")?,
    };
    params.validate().map_err(|e| lines.err(e.to_string()))?;

    let mut trees = Vec::with_capacity(n_trees);
    for _ in 0..n_trees {
        let t = lines.next("tree header")?;
        if t.len() != 2 || t[0] != "T" {
            return Err(lines.err("expected `T <n_nodes>`"));
        }
        let n_nodes: usize = lines.num(&t[1], "node count")?;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 16));
        read_subtree(&mut lines, &mut nodes, n_nodes, n_features, 0, params.max_depth)?;
        if nodes.len() != n_nodes {
            return Err(lines.err(format!("tree declared {n_nodes} nodes but has {}", nodes.len())));
        }
        trees.push(Tree { nodes });
    }
    if let Some((i, extra)) = lines.it.next() {
        return Err(Error::parse(path, i as u64 + 1, format!("trailing content {extra:?}")));
    }
    Ok(GbdtModel { base_score, n_features, trees, params })
}

pub fn load_model(path: impl AsRef<Path>) -> Result<GbdtModel> {
    let path = path.as_ref();
    read_model_from(open(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gbdt::{gbdt_fit, gbdt_predict};

    #[test]
    fn round_trip_is_exact() {
        let rows: Vec<Vec<f64>> = (0..60).map(|i| vec![(i % 11) as f64 * 0.3, (i % 3) as f64]).collect();
        let labels: Vec<u8> = (0..60).map(|i| u8::from(i % 11 > 5)).collect();
        let m = gbdt_fit(&rows, &labels, &GbdtParams { n_trees: 8, ..GbdtParams::default() }).unwrap();
        let p = Path::new("m");
        let mut buf = Vec::new();
        write_model_to(&m, &mut buf, p).unwrap();
        let back = read_model_from(&buf[..], p).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        write_model_to(&back, &mut again, p).unwrap();
        assert_eq!(again, buf);
        assert_eq!(gbdt_predict(&back, &rows).unwrap(), gbdt_predict(&m, &rows).unwrap());
    }

    #[test]
    fn rejects_malformed() {
        let p = Path::new("m");
        let good = "GBDT v1 1 0e0 1e-1\nP 2 1 1e0 1e0 1e0 0\nT 3\nN 1 5e-1 1e0\nL 1e0\nL -1e0\n";
        assert!(read_model_from(good.as_bytes(), p).is_ok());
        assert!(read_model_from(good.replace("N 1", "N 2").as_bytes(), p).is_err());
        assert!(read_model_from(good.replace("v1", "v2").as_bytes(), p).is_err());
        assert!(read_model_from(good.replace("T 3", "T 4").as_bytes(), p).is_err());
        assert!(read_model_from(good.replace("P 2 1", "P 2 0").as_bytes(), p).is_err());
        assert!(read_model_from(format!("{good}L 0e0\n").as_bytes(), p).is_err());
        assert!(read_model_from(&good.as_bytes()[..good.len() - 8], p).is_err());
    }
}
