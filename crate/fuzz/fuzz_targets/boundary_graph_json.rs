#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = pisotile::graphs::BoundaryGraph::from_json(s) {
            let json = g.to_json();
            let again = pisotile::graphs::BoundaryGraph::from_json(&json)
                .expect("canonical JSON must reparse");
            assert_eq!(again, g);
            assert_eq!(again.to_json(), json);
        }
    }
});
