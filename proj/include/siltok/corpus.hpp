#ifndef SILTOK_CORPUS_HPP
#define SILTOK_CORPUS_HPP

#include <filesystem>
#include <span>
#include <vector>

#include "siltok/bitgrid.hpp"

namespace siltok {

/// Loads every sequence under `root`, sorted lexicographically by entry name.
/// A subdirectory is a PGM sequence (frames named <number>.pgm, ordered by
/// numeric value); a *.silb file is a packed sequence. Anything else is
/// rejected by name. Token streams depend on this ordering.
std::vector<SilhouetteSequence> load_corpus(const std::filesystem::path& root);

/// One subdirectory per sequence, frames written as 1-based <###>.pgm.
void write_corpus_pgm_tree(const std::filesystem::path& root,
                           std::span<const SilhouetteSequence> corpus);

/// One <label>.silb file per sequence.
void write_corpus_silb(const std::filesystem::path& root,
                       std::span<const SilhouetteSequence> corpus);

/// Throws unless all sequences share one frame geometry; returns (height,
/// width). Corpus-level statistics and tokenization require this.
std::pair<uint32_t, uint32_t> corpus_dimensions(std::span<const SilhouetteSequence> corpus);

} // namespace siltok

#endif // SILTOK_CORPUS_HPP
