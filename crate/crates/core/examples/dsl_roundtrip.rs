//! Parses a `.site` document, validates it, runs its checks and prints the canonical form.

use std::env;
use std::fs;

use finsite::dsl;

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/gd1.site").into());
    let text = fs::read_to_string(&path).expect("readable document");
    let doc = match dsl::parse(&text) {
        Ok(doc) => doc,
        Err(diags) => {
            eprintln!("{diags}");
            std::process::exit(2);
        }
    };
    for (span, r) in dsl::validate(&doc) {
        println!("{span}  {r}");
    }
    for (c, span) in doc.checks() {
        match dsl::run_check(&doc, c) {
            Ok(o) => {
                for r in &o.reports {
                    println!("{span}  {r}");
                }
            }
            Err(e) => println!("{span}  input error: {e}"),
        }
    }
    println!("\n{}", dsl::serialize(&doc));
}
