#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(r) = pisotile::text::parse_rational(s) {
            // formatting must round-trip to the same reduced rational
            let printed = pisotile::text::format_rational(&r);
            let reparsed = pisotile::text::parse_rational(&printed)
                .expect("formatted rational must reparse");
            assert_eq!(reparsed, r);
        }
    }
});
