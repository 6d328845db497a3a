//! Rewrites fixtures/*.json from a fresh trace of the degree-5 example.
//! Run from crates/core: `cargo run --example regenerate_fixtures`.

use rmaps::critical::critical_data;
use rmaps::fixtures::example_function;
use rmaps::gamma::real_line_gamma;
use rmaps::io;

fn main() {
    let f = example_function();
    let cd = critical_data(&f).unwrap();
    let e = rmaps::trace::pullback_rmap(&f, &real_line_gamma(&cd).unwrap()).unwrap();
    std::fs::write("fixtures/example_rmap.json", io::to_canonical_string(&io::map_to_json(&e.map))).unwrap();
    let t = e.map.forget_valence2().unwrap().without_labelling();
    std::fs::write("fixtures/example_tgraph.json", io::to_canonical_string(&io::map_to_json(&t))).unwrap();
}
