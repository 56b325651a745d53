#include "signal_lab/types.hpp"

namespace signal_lab {

void validate_sample(const LabeledSample& sample) {
  if (sample.y.size() != sample.x.rows()) {
    throw ShapeError("response length " + std::to_string(sample.y.size()) +
                     " does not match covariate rows " +
                     std::to_string(sample.x.rows()));
  }
  if (sample.p() < 1) throw ShapeError("need at least one covariate column");
  if (sample.n() < 2) throw SampleSizeError("need at least two observations");
  if (!sample.x.allFinite() || !sample.y.allFinite()) {
    throw DataError("sample contains non-finite entries");
  }
}

void validate_index_set(const IndexSet& indices, Index p) {
  Index prev = -1;
  for (const Index j : indices) {
    if (j < 0 || j >= p) {
      throw ShapeError("covariate index " + std::to_string(j) +
                       " out of range [0, " + std::to_string(p) + ")");
    }
    if (j <= prev) throw ShapeError("covariate indices must be sorted and unique");
    prev = j;
  }
}

}  // namespace signal_lab
