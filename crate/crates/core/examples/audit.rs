//! Runs an audit suite and prints its report; `--endomorphisms` widens the
//! canonical-collapse suite to bases with idempotents and shows a shrunk
//! counterexample.

use finsite::audit::{run_audit, AuditConfig, Suite};

fn main() {
    let mut args = std::env::args().skip(1);
    let suite = args.next().and_then(|s| Suite::from_name(&s)).unwrap_or(Suite::CanonicalCollapse);
    let mut config = AuditConfig::new(suite);
    config.bounds.endomorphisms |= args.any(|a| a == "--endomorphisms");
    let report = run_audit(&config);
    print!("{}", report.text());
}
