#include "spiraldim/error.hpp"

namespace spiraldim {

void fail_precondition(const std::string& what) { throw PreconditionError(what); }

}  // namespace spiraldim
