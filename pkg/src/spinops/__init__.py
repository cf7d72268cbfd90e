# spinops package
