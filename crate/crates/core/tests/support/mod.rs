pub mod condensed;
