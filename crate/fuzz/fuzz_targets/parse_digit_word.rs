#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(word) = pisotile::text::parse_digit_word(s) {
            let printed = pisotile::text::format_digit_word(&word);
            let reparsed = pisotile::text::parse_digit_word(&printed)
                .expect("formatted digit word must reparse");
            assert_eq!(reparsed, word);
        }
    }
});
