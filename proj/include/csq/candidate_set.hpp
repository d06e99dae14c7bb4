#pragma once

#include <algorithm>
#include <vector>

namespace csq {

/// Class subset shown to the annotator, ordered by descending model
/// probability (ties by ascending class id). Never empty.
struct CandidateSet {
    std::vector<int> classes;

    int size() const { return static_cast<int>(classes.size()); }
    bool contains(int cls) const {
        return std::find(classes.begin(), classes.end(), cls) != classes.end();
    }
};

}  // namespace csq
