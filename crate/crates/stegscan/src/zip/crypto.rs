//! The traditional PKZIP ("ZipCrypto") stream cipher. Weak by modern
//! standards, which is exactly why dictionary attacks against it work.

use crate::util::crc32_update;

#[derive(Debug, Clone)]
pub struct ZipCryptoKeys {
    key0: u32,
    key1: u32,
    key2: u32,
}

impl ZipCryptoKeys {
    pub fn new(password: &[u8]) -> Self {
        let mut keys = ZipCryptoKeys {
            key0: 0x1234_5678,
            key1: 0x2345_6789,
            key2: 0x3456_7890,
        };
        for &b in password {
            keys.update(b);
        }
        keys
    }

    fn update(&mut self, plain: u8) {
        // The cipher uses the raw table-driven CRC step, without the usual
        // init/final inversions.
        self.key0 = crc32_update(self.key0, plain);
        self.key1 = self
            .key1
            .wrapping_add(self.key0 & 0xFF)
            .wrapping_mul(0x0808_8405)
            .wrapping_add(1);
        self.key2 = crc32_update(self.key2, (self.key1 >> 24) as u8);
    }

    fn stream_byte(&self) -> u8 {
        let tmp = (self.key2 | 3) as u16;
        ((tmp.wrapping_mul(tmp ^ 1)) >> 8) as u8
    }

    pub fn decrypt_byte(&mut self, cipher: u8) -> u8 {
        let plain = cipher ^ self.stream_byte();
        self.update(plain);
        plain
    }

    pub fn encrypt_byte(&mut self, plain: u8) -> u8 {
        let cipher = plain ^ self.stream_byte();
        self.update(plain);
        cipher
    }

    pub fn decrypt_in_place(&mut self, data: &mut [u8]) {
        for b in data {
            *b = self.decrypt_byte(*b);
        }
    }

    pub fn encrypt_in_place(&mut self, data: &mut [u8]) {
        for b in data {
            *b = self.encrypt_byte(*b);
        }
    }
}
